#include "lever/generators.hpp"

#include "lever/error.hpp"

#include <algorithm>
#include <cmath>

namespace lever {

namespace {

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, RandomStream& stream) {
    Matrix m(rows, cols);
    // Fill row by row so the stream order matches the row-major file layout.
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stream.normal();
    }
    return m;
}

Matrix orthonormal_columns(Eigen::Index rows, Eigen::Index cols, RandomStream& stream) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(rows, cols, stream));
    return qr.householderQ() * Matrix::Identity(rows, cols);
}

} // namespace

std::string to_string(Generator g) {
    switch (g) {
    case Generator::gaussian: return "gaussian";
    case Generator::ill_conditioned: return "ill_conditioned";
    case Generator::coherent_rows: return "coherent_rows";
    }
    return "unknown";
}

Generator parse_generator(const std::string& text) {
    if (text == "gaussian") return Generator::gaussian;
    if (text == "ill_conditioned") return Generator::ill_conditioned;
    if (text == "coherent_rows") return Generator::coherent_rows;
    throw Error(ErrorCode::InvalidArgument, "unknown generator '" + text + "'");
}

DenseMatrix generate_design(Generator g, std::size_t n, std::size_t d, Seed seed) {
    if (n < 1 || d < 1) throw Error(ErrorCode::NonPositiveDimension, "n and d must be positive");
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(d);
    RandomStream stream(seed);

    switch (g) {
    case Generator::gaussian:
        return DenseMatrix(gaussian(rows, cols, stream));
    case Generator::ill_conditioned: {
        const Eigen::Index k = std::min(rows, cols);
        Vector s(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            s(i) = k == 1 ? 1.0 : std::pow(10.0, -8.0 * static_cast<double>(i) / static_cast<double>(k - 1));
        }
        const Matrix left = orthonormal_columns(rows, k, stream);
        const Matrix right = orthonormal_columns(cols, k, stream);
        return DenseMatrix(Matrix(left * s.asDiagonal() * right.transpose()));
    }
    case Generator::coherent_rows: {
        Matrix m = gaussian(rows, cols, stream);
        // One row dominating its own direction carries leverage close to 1.
        m.row(0) *= 1e3 * std::sqrt(static_cast<double>(n));
        return DenseMatrix(std::move(m));
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown generator");
}

RegressionInstance make_instance(Generator g, std::size_t n, std::size_t d, std::size_t big_n, Seed seed,
                                 double residual_fraction) {
    if (big_n < 1) throw Error(ErrorCode::NonPositiveDimension, "N must be positive");
    RegressionInstance out{generate_design(g, n, d, derive_seed(seed, 0)), DenseMatrix(), Matrix()};
    RandomStream stream(derive_seed(seed, 1));
    out.planted = gaussian(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(big_n), stream);
    const Matrix signal = out.A.values() * out.planted;
    Matrix noise = gaussian(signal.rows(), signal.cols(), stream);
    const double noise_norm = noise.norm();
    if (noise_norm > 0.0) noise *= residual_fraction * signal.norm() / noise_norm;
    out.B = DenseMatrix(Matrix(signal + noise));
    return out;
}

} // namespace lever
