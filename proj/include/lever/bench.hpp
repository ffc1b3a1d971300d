#pragma once

// Seeded Monte Carlo harness: one fixed instance, many sketch seeds, each
// trial scored against the exact oracle.

#include "lever/generators.hpp"
#include "lever/solve.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lever {

struct BenchSpec {
    Generator generator = Generator::gaussian;
    std::size_t n = 1024;
    std::size_t d = 8;
    std::size_t N = 1;
    double eps = 0.25;
    std::optional<double> lambda;      // absolute
    std::optional<double> lambda_rel;  // lambda = lambda_rel * ||A||^2
    std::size_t trials = 100;
    Seed base_seed = 0;
    ScoresOptions scores;
    std::optional<std::size_t> m;
    double residual_fraction = 0.5;

    bool is_ridge() const noexcept { return lambda.has_value() || lambda_rel.has_value(); }
    void validate() const;
};

/// Parses a BenchSpec from JSON text; throws MalformedInput on bad structure.
BenchSpec parse_bench_spec(const std::string& json_text);

struct BenchRow {
    std::size_t trial = 0;
    Seed seed = 0;
    std::size_t m = 0;
    std::size_t retries = 0;
    double ratio = 0.0;  // +inf when the trial failed (rank collapse)
    bool passed = false;
    std::uint64_t rows_classical = 0;
    double rows_quantum_model = 0.0;
    double wall_ms = 0.0;
};

struct BenchResult {
    BenchSpec spec;
    std::vector<BenchRow> rows;
    std::size_t passes = 0;
    double oracle_objective = 0.0;
    std::optional<double> lambda;  // resolved value
    std::optional<double> sd;

    double pass_fraction() const noexcept {
        return rows.empty() ? 0.0 : static_cast<double>(passes) / static_cast<double>(rows.size());
    }
};

/// Worker count from LEVER_SKETCH_THREADS (unset or 0: hardware concurrency).
std::size_t bench_threads_from_env();

/// Trials may run on `threads` workers; rows are always in trial order and
/// their content does not depend on the worker count.
BenchResult run_bench(const BenchSpec& spec, std::size_t threads = 1);

struct BenchCsvOptions {
    bool timing = true;  // emit the wall_ms column
};

std::string bench_csv_header(const BenchCsvOptions& opts = {});
std::string bench_csv_body(const BenchResult& result, const BenchCsvOptions& opts = {});
std::string bench_summary_line(const BenchResult& result);

} // namespace lever
