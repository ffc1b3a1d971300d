#include "lever/leverage.hpp"

#include "lever/error.hpp"
#include "lever/matrix_io.hpp"
#include "lever/qcost.hpp"

#include <cmath>
#include <numeric>
#include <ostream>

#include <json.hpp>

namespace lever {

namespace {

void check_eps0(double eps0) {
    if (!(eps0 > 0.0 && eps0 < 1.0)) {
        throw Error(ErrorCode::Eps0OutOfRange, "eps0 must lie in (0, 1)");
    }
}

void check_lambda_positive(double lambda) {
    if (!(lambda > 0.0)) {
        throw Error(ErrorCode::NegativeLambda, "ridge basis requires lambda > 0");
    }
}

} // namespace

LeverageProfile exact_leverage_scores(const DenseMatrix& a, QueryLedger* ledger) {
    const FactorizationBundle qr = orthonormal_basis(a);
    if (ledger) ledger->record("leverage", a.rows());

    LeverageProfile out;
    out.mode = ScoreMode::exact;
    out.rank = qr.rank;
    out.scores.resize(a.rows());
    for (Eigen::Index i = 0; i < qr.basis.rows(); ++i) {
        out.scores[static_cast<std::size_t>(i)] = qr.basis.row(i).squaredNorm();
    }
    out.score_sum = std::accumulate(out.scores.begin(), out.scores.end(), 0.0);
    return out;
}

LeverageProfile perturb_scores(const LeverageProfile& exact, double eps0, Seed seed) {
    check_eps0(eps0);
    RandomStream stream(seed);
    LeverageProfile out = exact;
    out.mode = ScoreMode::approximate;
    out.eps0 = eps0;
    for (double& s : out.scores) s *= stream.uniform(1.0 - eps0, 1.0 + eps0);
    out.score_sum = std::accumulate(out.scores.begin(), out.scores.end(), 0.0);
    return out;
}

LeverageProfile approx_leverage_scores(const DenseMatrix& a, double eps0, Seed seed, QueryLedger* ledger) {
    check_eps0(eps0);
    return perturb_scores(exact_leverage_scores(a, ledger), eps0, seed);
}

double statistical_dimension(const Vector& singular_values, double lambda) {
    if (lambda < 0.0 || std::isnan(lambda)) {
        throw Error(ErrorCode::NegativeLambda, "lambda must be nonnegative");
    }
    double sd = 0.0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
        const double s = singular_values(i);
        sd += (s * s) / (s * s + lambda);
    }
    return sd;
}

LeverageProfile RidgeBasis::profile() const {
    LeverageProfile out;
    out.mode = ScoreMode::exact;
    out.scores = ridge_scores;
    out.rank = static_cast<std::size_t>(singular_values.size());
    out.score_sum = std::accumulate(ridge_scores.begin(), ridge_scores.end(), 0.0);
    return out;
}

RidgeBasis ridge_basis(const DenseMatrix& a, double lambda, QueryLedger* ledger) {
    check_lambda_positive(lambda);
    const FactorizationBundle svd = svd_factor(a);
    if (ledger) ledger->record("leverage", a.rows());

    RidgeBasis out;
    out.lambda = lambda;
    out.singular_values = svd.singular_values;
    out.sd = statistical_dimension(svd.singular_values, lambda);

    const Vector& s = svd.singular_values;
    const Vector scale = (s.array() / (s.array().square() + lambda).sqrt()).matrix();
    out.u1 = svd.basis * scale.asDiagonal();

    out.shrink = Vector::Constant(static_cast<Eigen::Index>(a.cols()), 1.0 / std::sqrt(lambda));
    out.shrink.head(s.size()) = (s.array().square() + lambda).rsqrt().matrix();

    out.ridge_scores.resize(a.rows());
    for (Eigen::Index i = 0; i < out.u1.rows(); ++i) {
        out.ridge_scores[static_cast<std::size_t>(i)] = out.u1.row(i).squaredNorm();
    }
    // Columns of U1 are orthogonal, so its singular values are the scale entries.
    out.spectral_norm_u1 = scale.size() > 0 ? scale.maxCoeff() : 0.0;
    out.frob_sq_u1 = out.u1.squaredNorm();
    return out;
}

Matrix augmented_ridge_basis(const DenseMatrix& a, double lambda) {
    check_lambda_positive(lambda);
    if (a.is_zero()) throw Error(ErrorCode::AllZeroMatrix, "matrix has no nonzero entry");
    const Eigen::Index n = a.values().rows();
    const Eigen::Index d = a.values().cols();
    Eigen::BDCSVD<Matrix> svd(a.values(), Eigen::ComputeThinU | Eigen::ComputeFullV);

    // Pad singular values with zeros up to d; U columns beyond min(n, d) are unused.
    Vector s = Vector::Zero(d);
    s.head(svd.singularValues().size()) = svd.singularValues();
    const Vector shrink = (s.array().square() + lambda).rsqrt().matrix();

    const Eigen::Index k = svd.singularValues().size();
    Matrix out = Matrix::Zero(n + d, d);
    out.topLeftCorner(n, k) = svd.matrixU() * (s.head(k).cwiseProduct(shrink.head(k))).asDiagonal();
    out.bottomRows(d) = svd.matrixV() * (std::sqrt(lambda) * shrink).asDiagonal();
    return out;
}

void write_profile_csv(std::ostream& out, const LeverageProfile& profile) {
    for (std::size_t i = 0; i < profile.scores.size(); ++i) {
        out << i << ',' << format_double(profile.scores[i]) << '\n';
    }
}

std::string ridge_summary_json(const RidgeBasis& basis) {
    nlohmann::ordered_json j;
    j["lambda"] = basis.lambda;
    j["sd"] = basis.sd;
    j["spectral_norm_u1"] = basis.spectral_norm_u1;
    j["frob_sq_u1"] = basis.frob_sq_u1;
    return j.dump();
}

} // namespace lever
