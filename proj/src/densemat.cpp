#include "lever/densemat.hpp"

#include "lever/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace lever {

namespace {

std::size_t count_row_sparsity(const Matrix& m) {
    std::size_t best = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::size_t nnz = 0;
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (m(i, j) != 0.0) ++nnz;
        }
        best = std::max(best, nnz);
    }
    return best;
}

void require_nonzero(const DenseMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0 || a.is_zero()) {
        throw Error(ErrorCode::AllZeroMatrix, "matrix has no nonzero entry");
    }
}

Eigen::Index to_index(std::size_t v) { return static_cast<Eigen::Index>(v); }

} // namespace

DenseMatrix::DenseMatrix(Matrix values) : values_(std::move(values)) {
    if (!values_.allFinite()) {
        throw Error(ErrorCode::NonFiniteEntry, "matrix contains NaN or Inf");
    }
    row_sparsity_ = count_row_sparsity(values_);
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::span<const double> row_major) {
    if (row_major.size() != rows * cols) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(rows * cols) + " entries, got " +
                        std::to_string(row_major.size()));
    }
    values_.resize(to_index(rows), to_index(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            values_(to_index(i), to_index(j)) = row_major[i * cols + j];
        }
    }
    if (!values_.allFinite()) {
        throw Error(ErrorCode::NonFiniteEntry, "matrix contains NaN or Inf");
    }
    row_sparsity_ = count_row_sparsity(values_);
}

DenseMatrix DenseMatrix::zeros(std::size_t rows, std::size_t cols) {
    return DenseMatrix(Matrix::Zero(to_index(rows), to_index(cols)));
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    return DenseMatrix(Matrix::Identity(to_index(n), to_index(n)));
}

DenseMatrix DenseMatrix::column(std::span<const double> values) {
    return DenseMatrix(values.size(), 1, values);
}

std::vector<double> DenseMatrix::row_major_entries() const {
    std::vector<double> out;
    out.reserve(rows() * cols());
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) out.push_back(values_(i, j));
    }
    return out;
}

Matrix FactorizationBundle::reconstruct() const {
    if (right_factor) {
        const Matrix ur = basis * *right_factor;
        Matrix out(ur.rows(), ur.cols());
        for (Eigen::Index j = 0; j < ur.cols(); ++j) {
            out.col(column_order[static_cast<std::size_t>(j)]) = ur.col(j);
        }
        return out;
    }
    return basis * singular_values.asDiagonal() * right_singular->transpose();
}

double rank_tolerance(std::size_t rows, std::size_t cols) {
    return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon();
}

FactorizationBundle orthonormal_basis(const DenseMatrix& a) {
    require_nonzero(a);
    const Matrix& m = a.values();
    Eigen::ColPivHouseholderQR<Matrix> qr(m);
    qr.setThreshold(rank_tolerance(a.rows(), a.cols()));
    const Eigen::Index k = qr.rank();

    FactorizationBundle out;
    out.rank = static_cast<std::size_t>(k);
    out.basis = qr.householderQ() * Matrix::Identity(m.rows(), k);
    out.right_factor = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const auto& perm = qr.colsPermutation().indices();
    out.column_order.assign(perm.data(), perm.data() + perm.size());
    return out;
}

FactorizationBundle svd_factor(const DenseMatrix& a) {
    require_nonzero(a);
    Eigen::BDCSVD<Matrix> svd(a.values(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    const double cutoff = rank_tolerance(a.rows(), a.cols()) * s(0);
    Eigen::Index k = 0;
    while (k < s.size() && s(k) > cutoff) ++k;

    FactorizationBundle out;
    out.rank = static_cast<std::size_t>(k);
    out.basis = svd.matrixU().leftCols(k);
    out.singular_values = s.head(k);
    out.right_singular = svd.matrixV().leftCols(k);
    return out;
}

DenseMatrix exact_least_squares(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A has " + std::to_string(a.rows()) + " rows, B has " + std::to_string(b.rows()));
    }
    const double tol = rank_tolerance(a.rows(), a.cols());
    if (a.is_zero()) return DenseMatrix::zeros(a.cols(), b.cols());

    Eigen::ColPivHouseholderQR<Matrix> qr(a.values());
    qr.setThreshold(tol);
    if (qr.rank() == a.values().cols()) {
        return DenseMatrix(Matrix(qr.solve(b.values())));
    }
    // Rank deficient: minimum-norm solution through the truncated SVD.
    Eigen::BDCSVD<Matrix> svd(a.values(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(tol);
    return DenseMatrix(Matrix(svd.solve(b.values())));
}

Vector exact_ridge(const DenseMatrix& a, const Vector& b, double lambda) {
    if (lambda < 0.0 || std::isnan(lambda)) {
        throw Error(ErrorCode::NegativeLambda, "lambda must be nonnegative");
    }
    if (to_index(a.rows()) != b.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A has " + std::to_string(a.rows()) + " rows, b has " + std::to_string(b.size()));
    }
    if (lambda == 0.0) {
        return exact_least_squares(a, DenseMatrix(Matrix(b))).values().col(0);
    }
    const Eigen::Index n = a.values().rows();
    const Eigen::Index d = a.values().cols();
    Matrix stacked(n + d, d);
    stacked.topRows(n) = a.values();
    stacked.bottomRows(d) = std::sqrt(lambda) * Matrix::Identity(d, d);
    Vector rhs = Vector::Zero(n + d);
    rhs.head(n) = b;
    return stacked.householderQr().solve(rhs);
}

double spectral_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    const double max_abs = m.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) return 0.0;

    if (std::min(m.rows(), m.cols()) <= kSpectralSvdLimit) {
        Eigen::BDCSVD<Matrix> svd(m);
        return svd.singularValues()(0);
    }

    // Power iteration on M^T M from a fixed start vector.
    std::mt19937_64 gen(0x5eedULL);
    std::normal_distribution<double> normal;
    Vector v(m.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(gen);
    v.normalize();
    double estimate = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        const Vector mv = m * v;
        const double next = mv.norm();
        Vector w = m.transpose() * mv;
        const double wn = w.norm();
        if (wn == 0.0) break;
        v = w / wn;
        if (std::abs(next - estimate) <= 1e-10 * next) {
            estimate = next;
            break;
        }
        estimate = next;
    }
    return (m * v).norm();
}

std::size_t numerical_rank(const Matrix& m) {
    if (m.size() == 0) return 0;
    Eigen::BDCSVD<Matrix> svd(m);
    const Vector& s = svd.singularValues();
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cutoff = rank_tolerance(static_cast<std::size_t>(m.rows()),
                                         static_cast<std::size_t>(m.cols())) * s(0);
    std::size_t k = 0;
    while (static_cast<Eigen::Index>(k) < s.size() && s(static_cast<Eigen::Index>(k)) > cutoff) ++k;
    return k;
}

} // namespace lever
