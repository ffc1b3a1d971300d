#include "lever/error.hpp"
#include "lever/qcost.hpp"
#include "lever/random.hpp"

#include <doctest.h>

#include <array>
#include <algorithm>
#include <cmath>

using namespace lever;

namespace {

CostModelInputs inputs(std::uint64_t n, std::uint64_t d, double eps) {
    CostModelInputs in;
    in.n = n;
    in.d = d;
    in.eps = eps;
    return in;
}

// Direct scan of the power-of-two grid against the closed-form row count.
std::optional<std::uint64_t> brute_force_crossover(double d, double eps) {
    for (int e = 0; e <= 60; ++e) {
        const double n = std::ldexp(1.0, e);
        if (std::sqrt(n * d) / eps < n) return std::uint64_t{1} << e;
    }
    return std::nullopt;
}

} // namespace

TEST_SUITE("qcost") {

TEST_CASE("tmat examples") {
    CHECK(tmat(2, 2, 2, 2.372) == doctest::Approx(std::pow(2.0, 2.372)).epsilon(1e-15));
    CHECK(tmat(2, 2, 2, 2.372) == doctest::Approx(5.176).epsilon(1e-3));
    CHECK(tmat(4, 4, 16, 2.372) == doctest::Approx(16.0 * std::pow(4.0, 1.372)).epsilon(1e-15));
    CHECK(tmat(4, 4, 16, 2.372) == doctest::Approx(107.2).epsilon(1e-3));
    CHECK(tmat(7, 7, 7, 2.0) == 49.0);
    CHECK_THROWS_AS(tmat(0, 1, 1, 2.372), Error);
}

TEST_CASE("tmat is symmetric under all orderings") {
    RandomStream stream(5);
    for (int t = 0; t < 100; ++t) {
        std::array<std::int64_t, 3> v{};
        for (auto& x : v) x = 1 + static_cast<std::int64_t>(stream.uniform01() * 1000.0);
        const double ref = tmat(v[0], v[1], v[2], kDefaultOmega);
        std::sort(v.begin(), v.end());
        do {
            CHECK(tmat(v[0], v[1], v[2], kDefaultOmega) == ref);
        } while (std::next_permutation(v.begin(), v.end()));
    }
}

TEST_CASE("tmat divide identity away from the min switch") {
    // a = 64 stays the largest dimension after dividing by 4.
    CHECK(tmat(64, 8, 8, 2.372) == doctest::Approx(4.0 * tmat(16, 8, 8, 2.372)).epsilon(1e-14));
}

TEST_CASE("pipeline cost examples") {
    const CostReport r = quantum_pipeline_cost(inputs(1000000, 100, 0.1));
    CHECK(r.rows_quantum == doctest::Approx(1e5).epsilon(1e-15));
    CHECK(r.rows_classical == 1e6);
    CHECK(r.speedup() == doctest::Approx(10.0).epsilon(1e-14));

    SUBCASE("sampling every row gives no advantage") {
        CostModelInputs in = inputs(4096, 16, 0.25);
        in.m = 4096;
        CHECK(quantum_pipeline_cost(in).rows_quantum == doctest::Approx(4096.0).epsilon(1e-15));
    }
    SUBCASE("square inputs") {
        for (const double eps : {0.1, 0.5, 0.9}) {
            const CostReport sq = quantum_pipeline_cost(inputs(512, 512, eps));
            CHECK(sq.rows_quantum == doctest::Approx(512.0 / eps).epsilon(1e-14));
            CHECK(sq.rows_quantum >= sq.rows_classical);
        }
    }
    SUBCASE("time terms") {
        CostModelInputs in = inputs(10000, 10, 0.5);
        in.N = 4;
        in.r = 3;
        const CostReport t = quantum_pipeline_cost(in);
        CHECK(t.time_sampling == doctest::Approx(3.0 * std::sqrt(1e5) / 0.5));
        CHECK(t.time_solve == doctest::Approx(std::pow(10.0, 2.372) / 0.5));
        CHECK(t.time_multiple == doctest::Approx(4.0 * std::pow(10.0, 1.372) / 0.5));
        CHECK(t.time_quantum == doctest::Approx(t.time_sampling + t.time_solve + t.time_multiple));
        in.N = 1;
        CHECK(quantum_pipeline_cost(in).time_multiple == 0.0);
    }
    SUBCASE("ridge uses sd in the square root") {
        CostModelInputs in = inputs(10000, 10, 0.5);
        in.lambda = 1.0;
        in.sd = 2.5;
        CHECK(quantum_pipeline_cost(in).rows_quantum == doctest::Approx(std::sqrt(25000.0) / 0.5));
    }
    SUBCASE("single_log multiplies by log2(n + 2)") {
        CostModelInputs in = inputs(1022, 4, 0.5);
        const double plain = quantum_pipeline_cost(in).rows_quantum;
        in.log_policy = LogPolicy::single_log;
        CHECK(quantum_pipeline_cost(in).rows_quantum == doctest::Approx(10.0 * plain).epsilon(1e-14));
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(quantum_pipeline_cost(inputs(0, 1, 0.5)), Error);
    CHECK_THROWS_AS(quantum_pipeline_cost(inputs(10, 1, 1.0)), Error);
    CostModelInputs in = inputs(10, 2, 0.5);
    in.eps0 = 0.0;
    CHECK_THROWS_AS(quantum_pipeline_cost(in), Error);
    CHECK(parse_log_policy("single_log") == LogPolicy::single_log);
    CHECK_THROWS_AS(parse_log_policy("double"), Error);
}

TEST_CASE("monotonicity") {
    RandomStream stream(9);
    for (int t = 0; t < 50; ++t) {
        const auto n = 1 + static_cast<std::uint64_t>(stream.uniform01() * 1e6);
        const auto d = 1 + static_cast<std::uint64_t>(stream.uniform01() * 100);
        const double eps = 0.05 + 0.9 * stream.uniform01();
        const double base = quantum_pipeline_cost(inputs(n, d, eps)).rows_quantum;
        CHECK(quantum_pipeline_cost(inputs(n + 1, d, eps)).rows_quantum >= base);
        CHECK(quantum_pipeline_cost(inputs(n, d + 1, eps)).rows_quantum >= base);
        CHECK(quantum_pipeline_cost(inputs(n, d, eps * 0.9)).rows_quantum >= base);
    }
}

TEST_CASE("crossover examples") {
    // sqrt(100 n) / 0.1 < n  <=>  n > 10^4, first power of two is 2^14.
    CHECK(crossover(inputs(1, 100, 0.1)) == brute_force_crossover(100, 0.1));
    CHECK(crossover(inputs(1, 100, 0.1)) == std::uint64_t{16384});
    CHECK(crossover(inputs(1, 1, 0.99)) == std::uint64_t{2});

    CostModelInputs logged = inputs(1, 100, 0.1);
    logged.log_policy = LogPolicy::single_log;
    const auto shifted = crossover(logged);
    REQUIRE(shifted.has_value());
    CHECK(*shifted > 16384);

    CostModelInputs all_rows = inputs(1, 4, 0.5);
    all_rows.m = std::uint64_t{1} << 61;
    CHECK_FALSE(crossover(all_rows).has_value());
}

TEST_CASE("crossover is consistent with the grid") {
    RandomStream stream(11);
    for (int t = 0; t < 50; ++t) {
        const auto d = 1 + static_cast<std::uint64_t>(stream.uniform01() * 500);
        const double eps = 0.05 + 0.9 * stream.uniform01();
        for (const LogPolicy policy : {LogPolicy::none, LogPolicy::single_log}) {
            CostModelInputs in = inputs(1, d, eps);
            in.log_policy = policy;
            const auto star = crossover(in);
            REQUIRE(star.has_value());
            if (policy == LogPolicy::none) CHECK(star == brute_force_crossover(static_cast<double>(d), eps));
            for (std::uint64_t n = *star; n <= (*star << 6); n <<= 1) {
                in.n = n;
                CHECK(quantum_pipeline_cost(in).rows_quantum < static_cast<double>(n));
            }
            if (*star > 1) {
                in.n = *star / 2;
                CHECK(quantum_pipeline_cost(in).rows_quantum >= static_cast<double>(in.n));
            }
        }
    }
}

TEST_CASE("ledger conservation and merge") {
    QueryLedger a;
    a.record("leverage", 100);
    a.record("sketch", 7);
    a.record("sketch", 3);
    CHECK(a.stage_rows("sketch") == 10);
    CHECK(a.stage_rows("missing") == 0);
    CHECK(a.rows_read_classical() == 110);
    QueryLedger b;
    b.record("evaluate", 100);
    b.record("sketch", 1);
    a.merge(b);
    CHECK(a.rows_read_classical() == 211);
    CHECK(a.stages().size() == 3);
    std::uint64_t total = 0;
    for (const auto& s : a.stages()) total += s.rows;
    CHECK(total == a.rows_read_classical());
}

TEST_CASE("serialization") {
    CostModelInputs in = inputs(1000000, 100, 0.1);
    const CostReport r = quantum_pipeline_cost(in);
    CHECK(cost_csv_header() == "n,d,N,eps,lambda,sd,rows_classical,rows_quantum,time_quantum_terms,log_policy");
    const std::string row = cost_csv_row(r);
    CHECK(row.rfind("1000000,100,1,0.10000000000000001,,,1000000,", 0) == 0);
    CHECK(row.find(",none") != std::string::npos);
    const std::string json = cost_report_json(r);
    CHECK(json.find("\"rows_quantum\":100000") != std::string::npos);
}

} // TEST_SUITE
