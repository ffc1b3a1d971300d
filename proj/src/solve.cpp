#include "lever/solve.hpp"

#include "lever/error.hpp"

#include <cmath>
#include <string>

namespace lever {

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::EpsOutOfRange, "eps must lie in (0, 1)");
}

LeverageProfile maybe_perturb(LeverageProfile exact, const ScoresOptions& scores, Seed seed) {
    if (scores.mode == ScoreMode::exact) return exact;
    return perturb_scores(exact, scores.eps0, derive_seed(seed, kScoreNoiseStream));
}

void record_quantum_model(QueryLedger& ledger, std::size_t n, std::size_t d, std::size_t big_n, double eps,
                          std::size_t m) {
    CostModelInputs in;
    in.n = n;
    in.d = d;
    in.N = big_n;
    in.eps = eps;
    in.r = 1;
    in.m = m;
    ledger.rows_quantum_model = quantum_pipeline_cost(in).rows_quantum;
}

struct SketchedSolve {
    Matrix X;
    bool collapsed = false;
};

// Least squares on the sketched rows. Rank is judged with the same cutoff as
// the full factorization.
SketchedSolve solve_sketched(const Matrix& sa, const Matrix& sb, std::size_t full_rank) {
    Eigen::ColPivHouseholderQR<Matrix> qr(sa);
    qr.setThreshold(rank_tolerance(static_cast<std::size_t>(sa.rows()), static_cast<std::size_t>(sa.cols())));
    const auto rank = static_cast<std::size_t>(qr.rank());
    if (rank < full_rank) return {Matrix(), true};
    if (rank == static_cast<std::size_t>(sa.cols())) return {qr.solve(sb), false};
    Eigen::BDCSVD<Matrix> svd(sa, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(rank_tolerance(static_cast<std::size_t>(sa.rows()), static_cast<std::size_t>(sa.cols())));
    return {svd.solve(sb), false};
}

} // namespace

void RegressionProblem::validate() const {
    check_eps(eps);
    if (A.rows() != B.rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A has " + std::to_string(A.rows()) + " rows, B has " + std::to_string(B.rows()));
    }
    if (mode == RegressionMode::linear && B.cols() != 1) {
        throw Error(ErrorCode::DimensionMismatch, "linear regression needs a single right-hand side");
    }
}

void RidgeProblem::validate() const {
    check_eps(eps);
    if (!(lambda > 0.0)) throw Error(ErrorCode::NegativeLambda, "ridge regression requires lambda > 0");
    if (static_cast<Eigen::Index>(A.rows()) != b.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "A has " + std::to_string(A.rows()) + " rows, b has " + std::to_string(b.size()));
    }
}

double ridge_objective(const Matrix& a, const Vector& b, const Vector& x, double lambda) {
    return (a * x - b).squaredNorm() + lambda * x.squaredNorm();
}

RegressionSolution solve_multiple(const RegressionProblem& p, const SolveOptions& opts) {
    p.validate();
    opts.sketch.validate();
    const Matrix& a = p.A.values();
    const Matrix& b = p.B.values();
    const std::size_t n = p.A.rows();
    const std::size_t d = p.A.cols();

    RegressionSolution out;
    out.seed = opts.sketch.seed;

    if (opts.identity_sketch) {
        const SketchOperator s = SketchOperator::identity(n);
        const std::size_t rank = orthonormal_basis(p.A).rank;
        out.ledger.record("leverage", n);
        SketchedSolve solved = solve_sketched(apply_sketch(s, a, &out.ledger), apply_sketch(s, b), rank);
        out.X = std::move(solved.X);
        out.m_used = n;
    } else {
        const LeverageProfile profile = maybe_perturb(exact_leverage_scores(p.A, &out.ledger), opts.scores, out.seed);
        const std::vector<double> q = build_distribution(profile);
        const std::size_t m = opts.sketch.m.value_or(recommended_m(d, p.eps, std::nullopt, opts.sketch));

        for (std::size_t attempt = 0;; ++attempt) {
            const SketchOperator s = draw_sketch(q, m, derive_seed(out.seed, kSketchStream + attempt));
            SketchedSolve solved = solve_sketched(apply_sketch(s, a, &out.ledger), apply_sketch(s, b), profile.rank);
            if (!solved.collapsed) {
                out.X = std::move(solved.X);
                break;
            }
            if (attempt == kMaxSketchRetries) {
                throw Error(ErrorCode::SketchRankCollapse,
                            "rank(SA) < rank(A) after " + std::to_string(kMaxSketchRetries) + " retries");
            }
            ++out.retries;
        }
        out.m_used = m;
    }

    out.objective = (a * out.X - b).squaredNorm();
    out.ledger.record("evaluate", n);
    record_quantum_model(out.ledger, n, d, p.B.cols(), p.eps, out.m_used);
    return out;
}

RegressionSolution solve_linear(const RegressionProblem& p, const SolveOptions& opts) {
    RegressionProblem linear = p;
    linear.mode = RegressionMode::linear;
    return solve_multiple(linear, opts);
}

RegressionSolution solve_ridge(const RidgeProblem& p, const SolveOptions& opts) {
    p.validate();
    opts.sketch.validate();
    const Matrix& a = p.A.values();
    const std::size_t n = p.A.rows();
    const std::size_t d = p.A.cols();
    const auto di = static_cast<Eigen::Index>(d);

    RegressionSolution out;
    out.seed = opts.sketch.seed;

    const RidgeBasis basis = ridge_basis(p.A, p.lambda, &out.ledger);
    out.sd = basis.sd;

    SketchOperator s = SketchOperator::identity(n);
    if (!opts.identity_sketch) {
        const LeverageProfile profile = maybe_perturb(basis.profile(), opts.scores, out.seed);
        const std::vector<double> q = build_distribution(profile);
        const std::size_t m = opts.sketch.m.value_or(recommended_m(d, p.eps, basis.sd, opts.sketch));
        s = draw_sketch(q, m, derive_seed(out.seed, kSketchStream));
    }
    out.m_used = s.m();

    // Only the first n rows are sampled; the sqrt(lambda) I block is appended whole,
    // so the stacked system always has full column rank.
    const Matrix sa = apply_sketch(s, a, &out.ledger);
    const Matrix sb = apply_sketch(s, Matrix(p.b));
    const Eigen::Index m = sa.rows();
    Matrix stacked(m + di, di);
    stacked.topRows(m) = sa;
    stacked.bottomRows(di) = std::sqrt(p.lambda) * Matrix::Identity(di, di);
    Vector rhs = Vector::Zero(m + di);
    rhs.head(m) = sb.col(0);
    const Vector x = stacked.householderQr().solve(rhs);

    out.X = x;
    out.objective = ridge_objective(a, p.b, x, p.lambda);
    out.ledger.record("evaluate", n);
    record_quantum_model(out.ledger, n, d, 1, p.eps, out.m_used);
    return out;
}

} // namespace lever
