#include "lever/error.hpp"
#include "lever/solve.hpp"
#include "lever/verify.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace lever;
using lever::testing::gaussian_matrix;

namespace {

SketchOperator ls_sketch(const Matrix& a, std::size_t m, Seed seed) {
    return draw_sketch(build_distribution(exact_leverage_scores(DenseMatrix(a))), m, seed);
}

} // namespace

TEST_SUITE("verify") {

TEST_CASE("check_se examples") {
    const Matrix u = orthonormal_basis(DenseMatrix(gaussian_matrix(64, 4, 1))).basis;
    SUBCASE("identity sketch has zero deviation") {
        const auto r = check_se(u, SketchOperator::identity(64), 1e-6);
        CHECK(r.statistic <= 1e-14);
        CHECK(r.passed);
        CHECK(r.kind == CheckKind::SE);
    }
    SUBCASE("all-zero weights give deviation 1") {
        std::vector<Sample> samples(10, Sample{3, 0.0});
        const SketchOperator zero(64, samples, std::vector<double>(64, 1.0 / 64));
        const auto r = check_se(u, zero, 0.5);
        CHECK(r.statistic == doctest::Approx(1.0).epsilon(1e-15));
        CHECK_FALSE(r.passed);
    }
    SUBCASE("non-orthonormal input is rejected") {
        try {
            check_se(gaussian_matrix(64, 4, 2), SketchOperator::identity(64), 0.5);
            FAIL("expected NotOrthonormal");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::NotOrthonormal);
        }
    }
    SUBCASE("row mismatch") {
        CHECK_THROWS_AS(check_se(u, SketchOperator::identity(63), 0.5), Error);
    }
}

TEST_CASE("check_se Monte Carlo with the d ln d sample count") {
    const std::size_t d = 8;
    const Matrix a = gaussian_matrix(1024, static_cast<Eigen::Index>(d), 5);
    const Matrix u = orthonormal_basis(DenseMatrix(a)).basis;
    const auto q = build_distribution(exact_leverage_scores(DenseMatrix(a)));
    const auto m = static_cast<std::size_t>(std::ceil(40.0 * d * std::log(d + 2.0)));
    const TrialSummary summary = run_trials(CheckKind::SE, 100, 17, 0.99, [&](Seed seed) {
        return check_se(u, draw_sketch(q, m, seed), 0.5);
    });
    CHECK(summary.passes >= 99);
    CHECK(summary.passed());
}

TEST_CASE("check_famp examples") {
    const Matrix a = gaussian_matrix(200, 4, 3);
    const Matrix b = gaussian_matrix(200, 3, 4);
    SUBCASE("identity sketch") {
        CHECK(check_famp(a, b, SketchOperator::identity(200), 0.1).statistic <= 1e-28);
    }
    SUBCASE("zero B is rejected") {
        try {
            check_famp(a, Matrix::Zero(200, 3), SketchOperator::identity(200), 0.1);
            FAIL("expected ZeroNormInput");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ZeroNormInput);
        }
    }
    SUBCASE("Monte Carlo with m = 40 / eps^2") {
        const double eps = 0.25;
        const auto m = static_cast<std::size_t>(std::ceil(40.0 / (eps * eps)));
        const TrialSummary summary = run_trials(CheckKind::FAMP, 100, 23, 0.95, [&](Seed seed) {
            return check_famp(a, b, ls_sketch(a, m, seed), eps);
        });
        CHECK(summary.passes >= 95);
    }
}

TEST_CASE("check_samp examples") {
    SUBCASE("identity sketch") {
        const Matrix a = gaussian_matrix(50, 3, 8);
        CHECK(check_samp(a, a, SketchOperator::identity(50), 0.1).statistic <= 1e-14);
    }
    SUBCASE("ridge basis with the sd-scaled sample count") {
        const DenseMatrix a(gaussian_matrix(2048, 8, 9));
        const double s1 = spectral_norm(a);
        const double eps = 0.25;
        const RidgeBasis rb = ridge_basis(a, 0.1 * s1 * s1);
        const auto q = build_distribution(rb.profile());
        const std::size_t m = recommended_m(8, eps, rb.sd);
        const TrialSummary summary = run_trials(CheckKind::SAMP, 100, 29, 0.95, [&](Seed seed) {
            return check_samp(rb.u1, rb.u1, draw_sketch(q, m, seed), std::sqrt(eps));
        });
        CHECK(summary.passes >= 95);
    }
    SUBCASE("rank-1 inputs: spectral statistic squared equals the Frobenius statistic") {
        const Matrix u = gaussian_matrix(40, 1, 10);
        const Matrix v = gaussian_matrix(1, 3, 11);
        const Matrix a = 2.5 * u * v;
        for (Seed seed = 0; seed < 5; ++seed) {
            const auto s = draw_sketch(std::vector<double>(40, 1.0 / 40), 12, seed);
            const double samp = check_samp(a, a, s, 1.0).statistic;
            const double famp = check_famp(a, a, s, 1.0).statistic;
            CHECK(samp * samp == doctest::Approx(famp).epsilon(1e-10));
        }
    }
}

TEST_CASE("approx_ratio examples") {
    const Matrix a = gaussian_matrix(60, 3, 12);
    const Matrix b = gaussian_matrix(60, 2, 13);
    const Matrix x_star = exact_least_squares(DenseMatrix(a), DenseMatrix(b)).values();
    CHECK(approx_ratio(a, b, x_star, x_star).statistic == 1.0);

    SUBCASE("consistent system branch") {
        const Matrix x_true = gaussian_matrix(3, 2, 14);
        const Matrix consistent = a * x_true;
        const Matrix oracle = exact_least_squares(DenseMatrix(a), DenseMatrix(consistent)).values();
        const auto hit = approx_ratio(a, consistent, x_true, oracle, 1.25);
        CHECK(hit.statistic == 1.0);
        CHECK(hit.passed);
        const auto miss = approx_ratio(a, consistent, x_true + Matrix::Constant(3, 2, 0.1), oracle, 1.25);
        CHECK(std::isinf(miss.statistic));
        CHECK(miss.details == "ConsistentSystemMiss");
        CHECK_FALSE(miss.passed);
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(approx_ratio(a, b, Matrix::Zero(2, 2), x_star), Error);
    }
    SUBCASE("sketched solutions at eps = 0.25") {
        const RegressionProblem p{DenseMatrix(a * gaussian_matrix(3, 2, 15) + 0.5 * b), DenseMatrix(b), 0.25,
                                  RegressionMode::multiple};
        // Larger instance for the Monte Carlo part.
        const DenseMatrix big_a(gaussian_matrix(2048, 4, 16));
        const DenseMatrix big_b(Matrix(big_a.values() * gaussian_matrix(4, 1, 17) + gaussian_matrix(2048, 1, 18)));
        const Matrix oracle = exact_least_squares(big_a, big_b).values();
        const RegressionProblem big{big_a, big_b, 0.25, RegressionMode::linear};
        std::size_t passes = 0;
        for (Seed seed = 0; seed < 100; ++seed) {
            SolveOptions opts;
            opts.sketch.seed = seed;
            const auto sol = solve_linear(big, opts);
            const auto r = approx_ratio(big_a.values(), big_b.values(), sol.X, oracle, 1.25);
            CHECK(r.statistic >= 1.0 - 1e-10);
            passes += r.passed ? 1 : 0;
        }
        CHECK(passes >= 95);
        CHECK(p.A.rows() == 60);
    }
}

TEST_CASE("SE probes never exceed the spectral deviation and approach it") {
    const Matrix u = orthonormal_basis(DenseMatrix(gaussian_matrix(300, 3, 30))).basis;
    const auto s = ls_sketch(u, 40, 31);
    const double stat = check_se(u, s, 1.0).statistic;
    const Matrix su = apply_sketch(s, u);
    RandomStream stream(32);
    double best = 0.0;
    for (int probe = 0; probe < 1000; ++probe) {
        Vector x(3);
        for (Eigen::Index i = 0; i < 3; ++i) x(i) = stream.normal();
        x.normalize();
        const double dev = std::abs((su * x).squaredNorm() - (u * x).squaredNorm());
        CHECK(dev <= stat + 1e-12);
        best = std::max(best, dev);
    }
    CHECK(best >= 0.95 * stat);
}

TEST_CASE("FAMP statistic is invariant under a shared row permutation") {
    const Matrix a = gaussian_matrix(30, 3, 40);
    const Matrix b = gaussian_matrix(30, 2, 41);
    const auto s = ls_sketch(a, 25, 42);

    std::vector<std::size_t> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    RandomStream stream(43);
    std::shuffle(perm.begin(), perm.end(), stream.engine());

    Matrix pa(30, 3), pb(30, 2);
    std::vector<double> pq(30);
    for (std::size_t i = 0; i < 30; ++i) {
        pa.row(static_cast<Eigen::Index>(perm[i])) = a.row(static_cast<Eigen::Index>(i));
        pb.row(static_cast<Eigen::Index>(perm[i])) = b.row(static_cast<Eigen::Index>(i));
        pq[perm[i]] = s.distribution()[i];
    }
    std::vector<Sample> moved;
    for (const auto& sample : s.samples()) moved.push_back({perm[sample.index], sample.weight});
    const SketchOperator ps(30, moved, pq);
    CHECK(std::abs(check_famp(a, b, s, 1.0).statistic - check_famp(pa, pb, ps, 1.0).statistic) <= 1e-12);
}

TEST_CASE("reports serialize to JSON") {
    VerificationReport r;
    r.kind = CheckKind::FAMP;
    r.statistic = 0.5;
    r.threshold = 0.25;
    r.trials = 1;
    r.seed = 7;
    const std::string json = r.to_json();
    CHECK(json == R"({"kind":"FAMP","statistic":0.5,"threshold":0.25,"passed":false,"trials":1,"seed":7})");

    const TrialSummary summary = run_trials(CheckKind::SE, 3, 1, 0.5, [](Seed seed) {
        VerificationReport t;
        t.seed = seed;
        t.passed = seed % 2 == 0;
        return t;
    });
    CHECK(summary.trials() == 3);
    CHECK(summary.to_json().find("\"aggregate\"") != std::string::npos);
    CHECK_THROWS_AS(run_trials(CheckKind::SE, 0, 1, 0.5, [](Seed) { return VerificationReport{}; }), Error);
}

} // TEST_SUITE
