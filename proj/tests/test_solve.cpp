#include "lever/error.hpp"
#include "lever/generators.hpp"
#include "lever/solve.hpp"
#include "lever/verify.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace lever;
using lever::testing::gaussian_matrix;
using lever::testing::rows_of;

namespace {

SolveOptions seeded(Seed seed) {
    SolveOptions opts;
    opts.sketch.seed = seed;
    return opts;
}

double rel_diff(const Matrix& x, const Matrix& y) { return (x - y).norm() / std::max(1.0, y.norm()); }

} // namespace

TEST_SUITE("solve") {

TEST_CASE("identity sketch reproduces the exact oracles") {
    for (Seed seed = 0; seed < 10; ++seed) {
        const auto c = lever::testing::random_case(seed, 120, 10);
        const DenseMatrix b(gaussian_matrix(static_cast<Eigen::Index>(c.A.rows()), 3, seed + 100));
        SolveOptions opts;
        opts.identity_sketch = true;
        const auto sol = solve_multiple({c.A, b, 0.25, RegressionMode::multiple}, opts);
        CHECK(rel_diff(sol.X, exact_least_squares(c.A, b).values()) <= 1e-10);
        CHECK(sol.m_used == c.A.rows());

        const Vector rhs = b.values().col(0);
        const double s1 = spectral_norm(c.A);
        const double lambda = 0.1 * s1 * s1;
        const auto ridge = solve_ridge({c.A, rhs, lambda, 0.25}, opts);
        CHECK(rel_diff(ridge.X, exact_ridge(c.A, rhs, lambda)) <= 1e-10);
    }
}

TEST_CASE("consistent systems") {
    const DenseMatrix a(gaussian_matrix(500, 4, 1));
    SUBCASE("B = A") {
        const auto sol = solve_multiple({a, a, 0.25, RegressionMode::multiple}, seeded(3));
        CHECK(sol.objective <= 1e-16 * a.values().squaredNorm());
    }
    SUBCASE("b = A x") {
        const DenseMatrix b(Matrix(a.values() * gaussian_matrix(4, 1, 2)));
        const auto sol = solve_linear({a, b, 0.25, RegressionMode::linear}, seeded(4));
        CHECK(sol.objective <= 1e-16 * b.values().squaredNorm());
    }
}

TEST_CASE("b orthogonal to the column space") {
    const DenseMatrix a = rows_of({{1}, {0}});
    const DenseMatrix b = rows_of({{0}, {1}});
    for (Seed seed = 0; seed < 10; ++seed) {
        const auto sol = solve_linear({a, b, 0.5, RegressionMode::linear}, seeded(seed));
        CHECK(std::abs(sol.X(0, 0)) <= 1e-15);
        CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("linear mode needs one right-hand side; dimension checks") {
    const DenseMatrix a(gaussian_matrix(20, 2, 5));
    CHECK_THROWS_AS(solve_multiple({a, DenseMatrix(gaussian_matrix(20, 2, 6)), 0.25, RegressionMode::linear}), Error);
    try {
        solve_multiple({a, DenseMatrix(gaussian_matrix(19, 2, 6)), 0.25, RegressionMode::multiple});
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
    try {
        solve_ridge({a, Vector::Ones(20), 0.0, 0.25});
        FAIL("expected NegativeLambda");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NegativeLambda);
    }
}

TEST_CASE("rank collapse after the retry budget") {
    const DenseMatrix a(gaussian_matrix(50, 2, 7));
    SolveOptions opts = seeded(1);
    opts.sketch.m = 1;
    try {
        solve_multiple({a, DenseMatrix(gaussian_matrix(50, 1, 8)), 0.25, RegressionMode::multiple}, opts);
        FAIL("expected SketchRankCollapse");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SketchRankCollapse);
    }
}

TEST_CASE("a small sample count triggers recorded retries") {
    // Column 1 lives on 3 of 200 rows, so with m = 3 a draw often misses all of them.
    Matrix a = Matrix::Zero(200, 2);
    a.col(0).setOnes();
    a(0, 1) = a(1, 1) = a(2, 1) = 1.0;
    const DenseMatrix da(a);
    const DenseMatrix b(gaussian_matrix(200, 1, 9));
    std::size_t retried = 0;
    for (Seed seed = 0; seed < 40; ++seed) {
        SolveOptions opts = seeded(seed);
        opts.sketch.m = 3;
        try {
            retried += solve_multiple({da, b, 0.25, RegressionMode::multiple}, opts).retries > 0 ? 1 : 0;
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::SketchRankCollapse);
        }
    }
    CHECK(retried > 0);
}

TEST_CASE("ridge in the regularization-dominated limit") {
    const DenseMatrix a(gaussian_matrix(300, 5, 10));
    const Vector b = gaussian_matrix(300, 1, 11).col(0);
    const double s1 = spectral_norm(a);
    const auto sol = solve_ridge({a, b, 1e12 * s1 * s1, 0.25}, seeded(2));
    const double atb = (a.values().transpose() * b).norm();
    CHECK(Vector(sol.X.col(0)).norm() <= 1e-5 * atb / (s1 * s1));
    CHECK(std::abs(sol.objective - b.squaredNorm()) <= 1e-6 * b.squaredNorm());
    REQUIRE(sol.sd.has_value());
    CHECK(*sol.sd < 1e-6);
}

TEST_CASE("sketched solution satisfies the sketched normal equations") {
    const DenseMatrix a(gaussian_matrix(1000, 6, 12));
    const DenseMatrix b(gaussian_matrix(1000, 2, 13));
    const RegressionProblem p{a, b, 0.25, RegressionMode::multiple};
    const auto sol = solve_multiple(p, seeded(5));

    // Rebuild the same sketch as the solver (first attempt, no retry expected).
    REQUIRE(sol.retries == 0);
    const auto q = build_distribution(exact_leverage_scores(a));
    const auto s = draw_sketch(q, sol.m_used, derive_seed(5, kSketchStream));
    const Matrix sa = apply_sketch(s, a);
    const Matrix sb = apply_sketch(s, b);
    const Matrix lhs = sa.transpose() * sa * sol.X;
    const Matrix rhs = sa.transpose() * sb;
    CHECK((lhs - rhs).norm() <= 1e-8 * rhs.norm());
}

TEST_CASE("sketched objective never beats the oracle") {
    for (Seed seed = 0; seed < 20; ++seed) {
        const auto inst = make_instance(Generator::gaussian, 800, 5, 2, seed);
        const double best = (inst.A.values() * exact_least_squares(inst.A, inst.B).values() - inst.B.values())
                                .squaredNorm();
        const auto sol = solve_multiple({inst.A, inst.B, 0.5, RegressionMode::multiple}, seeded(seed));
        CHECK(sol.objective >= best - 1e-10);
    }
}

TEST_CASE("seed determinism") {
    const auto inst = make_instance(Generator::coherent_rows, 700, 4, 3, 20);
    const RegressionProblem p{inst.A, inst.B, 0.25, RegressionMode::multiple};
    const auto x1 = solve_multiple(p, seeded(77)).X;
    const auto x2 = solve_multiple(p, seeded(77)).X;
    CHECK(x1 == x2);
    CHECK(x1 != solve_multiple(p, seeded(78)).X);

    SolveOptions approx = seeded(77);
    approx.scores.mode = ScoreMode::approximate;
    CHECK(solve_multiple(p, approx).X == solve_multiple(p, approx).X);
}

TEST_CASE("ridge sample count shrinks as lambda grows") {
    const DenseMatrix a = generate_design(Generator::ill_conditioned, 1000, 8, 21);
    const Vector b = gaussian_matrix(1000, 1, 22).col(0);
    const double s1 = spectral_norm(a);
    std::size_t previous = 0;
    for (const double rel : {1.0, 0.1, 0.01}) {
        const auto sol = solve_ridge({a, b, rel * s1 * s1, 0.25}, seeded(3));
        CHECK(sol.m_used >= previous);
        previous = sol.m_used;
    }
}

TEST_CASE("ledger stages add up") {
    const auto inst = make_instance(Generator::gaussian, 1024, 8, 1, 30);
    const auto sol = solve_linear({inst.A, inst.B, 0.25, RegressionMode::linear}, seeded(1));
    std::uint64_t total = 0;
    for (const auto& stage : sol.ledger.stages()) total += stage.rows;
    CHECK(total == sol.ledger.rows_read_classical());
    CHECK(sol.ledger.stage_rows("leverage") == 1024);
    CHECK(sol.ledger.stage_rows("evaluate") == 1024);
    CHECK(sol.ledger.stage_rows("sketch") == sol.m_used * (sol.retries + 1));
    CHECK(sol.ledger.rows_quantum_model == doctest::Approx(std::sqrt(1024.0 * sol.m_used)));
}

TEST_CASE("Monte Carlo (1 + eps) guarantee at reduced scale") {
    const auto inst = make_instance(Generator::gaussian, 2048, 8, 4, 40);
    const Matrix oracle = exact_least_squares(inst.A, inst.B).values();
    const RegressionProblem p{inst.A, inst.B, 0.25, RegressionMode::multiple};
    const TrialSummary summary = run_trials(CheckKind::ratio, 100, 41, 0.95, [&](Seed seed) {
        const auto sol = solve_multiple(p, seeded(seed));
        return approx_ratio(inst.A.values(), inst.B.values(), sol.X, oracle, 1.25);
    });
    CHECK(summary.passes >= 95);
}

TEST_CASE("Monte Carlo ridge guarantee at reduced scale") {
    const auto inst = make_instance(Generator::gaussian, 2048, 8, 1, 50);
    const Vector b = inst.B.values().col(0);
    const double s1 = spectral_norm(inst.A);
    const double lambda = 0.1 * s1 * s1;
    const double best = ridge_objective(inst.A.values(), b, exact_ridge(inst.A, b, lambda), lambda);
    std::size_t passes = 0;
    for (Seed seed = 0; seed < 100; ++seed) {
        const auto sol = solve_ridge({inst.A, b, lambda, 0.25}, seeded(seed));
        CHECK(sol.objective >= best * (1.0 - 1e-12));
        passes += sol.objective <= 1.25 * best ? 1 : 0;
    }
    CHECK(passes >= 95);
}

} // TEST_SUITE
