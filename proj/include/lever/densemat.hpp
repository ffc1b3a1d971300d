#pragma once

// Dense matrix model, factorizations and exact regression oracles.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace lever {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Real n x d matrix with finite entries. Row sparsity is tracked as metadata
/// for the query-cost model; storage is always dense.
class DenseMatrix {
public:
    DenseMatrix() = default;

    /// Takes ownership of an Eigen matrix. Throws NonFiniteEntry on NaN/Inf.
    explicit DenseMatrix(Matrix values);

    /// Builds from row-major entries; entries.size() must equal rows * cols.
    DenseMatrix(std::size_t rows, std::size_t cols, std::span<const double> row_major);

    static DenseMatrix zeros(std::size_t rows, std::size_t cols);
    static DenseMatrix identity(std::size_t n);
    static DenseMatrix column(std::span<const double> values);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    double operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    const Matrix& values() const noexcept { return values_; }

    std::vector<double> row_major_entries() const;

    /// Maximum number of nonzeros in any row (0 for the zero matrix).
    std::size_t row_sparsity() const noexcept { return row_sparsity_; }

    bool is_zero() const noexcept { return row_sparsity_ == 0; }

    double frobenius_norm() const { return values_.norm(); }

private:
    Matrix values_;
    std::size_t row_sparsity_ = 0;
};

/// Result of a QR or SVD factorization. Fields not produced by the route that
/// built the bundle are left empty.
struct FactorizationBundle {
    Matrix basis;                          // U, n x k, orthonormal columns
    std::optional<Matrix> right_factor;    // R, k x d upper triangular (QR route, pivoted order)
    std::vector<Eigen::Index> column_order;// QR route: column j of U*R is column column_order[j] of A
    Vector singular_values;                // nonincreasing, SVD route
    std::optional<Matrix> right_singular;  // V, d x k, SVD route
    std::size_t rank = 0;

    /// U*R with columns restored to the order of A (QR), or U*S*V^T (SVD).
    Matrix reconstruct() const;
};

/// Numerical-rank cutoff relative to the largest singular value.
double rank_tolerance(std::size_t rows, std::size_t cols);

/// Column-pivoted Householder QR; U spans the column space with k = numerical rank.
FactorizationBundle orthonormal_basis(const DenseMatrix& a);

/// Thin SVD truncated to the numerical rank.
FactorizationBundle svd_factor(const DenseMatrix& a);

/// Minimum-norm minimizer of ||A X - B||_F.
DenseMatrix exact_least_squares(const DenseMatrix& a, const DenseMatrix& b);

/// Minimizer of ||A x - b||^2 + lambda ||x||^2. lambda == 0 falls back to
/// exact_least_squares.
Vector exact_ridge(const DenseMatrix& a, const Vector& b, double lambda);

double spectral_norm(const Matrix& m);
inline double spectral_norm(const DenseMatrix& m) { return spectral_norm(m.values()); }

/// Dimension above which spectral_norm switches to power iteration.
inline constexpr Eigen::Index kSpectralSvdLimit = 512;

/// Numerical rank of an arbitrary matrix using the same cutoff as the factorizations.
std::size_t numerical_rank(const Matrix& m);

} // namespace lever
