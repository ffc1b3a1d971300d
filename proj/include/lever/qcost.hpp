#pragma once

// Row-query accounting: an instrumented classical counter and the quantum
// query/time MODEL formulas (leading terms, constant 1). Quantum numbers are
// evaluated from formulas, never measured.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lever {

enum class LogPolicy { none, single_log };

std::string to_string(LogPolicy policy);
LogPolicy parse_log_policy(const std::string& text);

/// Classical row reads per pipeline stage plus the modeled quantum row count.
class QueryLedger {
public:
    struct Stage {
        std::string name;
        std::uint64_t rows = 0;
    };

    /// Adds `rows` reads to `stage`, creating it on first use.
    void record(const std::string& stage, std::uint64_t rows);

    std::uint64_t rows_read_classical() const noexcept { return total_; }
    std::uint64_t stage_rows(const std::string& stage) const;
    const std::vector<Stage>& stages() const noexcept { return stages_; }

    double rows_quantum_model = 0.0;

    /// Sums another ledger into this one (parallel-trial aggregation).
    void merge(const QueryLedger& other);

private:
    std::vector<Stage> stages_;
    std::uint64_t total_ = 0;
};

/// T_mat(a, b, c) model: s * t * u^(omega - 2) with u the smallest dimension.
double tmat(std::int64_t a, std::int64_t b, std::int64_t c, double omega);

inline constexpr double kDefaultOmega = 2.372;

struct CostModelInputs {
    std::uint64_t n = 1;
    std::uint64_t d = 1;
    std::uint64_t N = 1;
    double eps = 0.5;
    double eps0 = 0.1;
    std::uint64_t r = 1;   // row sparsity
    double omega = kDefaultOmega;
    std::optional<std::uint64_t> m;      // sample count, when known
    std::optional<double> lambda;        // ridge
    std::optional<double> sd;            // statistical dimension, ridge
    LogPolicy log_policy = LogPolicy::none;

    /// Throws on out-of-range values.
    void validate() const;
};

struct CostReport {
    CostModelInputs inputs;
    double rows_classical = 0.0;
    double rows_quantum = 0.0;

    // Time-model terms.
    double time_sampling = 0.0;       // r * sqrt(n * dim) / eps
    double time_solve = 0.0;          // d^omega / eps
    double time_multiple = 0.0;       // N * d^(omega-1) / eps, N > 1
    double time_quantum = 0.0;        // sum of the three terms above
    double time_linear_d15 = 0.0;     // sqrt(n) d^1.5 / eps + d^omega / eps
    double time_sampling_tool = 0.0;  // r * sqrt(n * dim) / eps + d^omega
    double time_leverage_estimation = 0.0; // r sqrt(nd)/eps0 + d^omega/eps0^2 + d^2/eps0^4

    double speedup() const { return rows_classical / rows_quantum; }
};

CostReport quantum_pipeline_cost(const CostModelInputs& in);

/// Smallest power of two n (up to 2^60) with rows_quantum(n) < n; nullopt if none.
std::optional<std::uint64_t> crossover(const CostModelInputs& in);

inline constexpr int kCrossoverMaxExponent = 60;

std::string cost_csv_header();
std::string cost_csv_row(const CostReport& report);
std::string cost_report_json(const CostReport& report);

} // namespace lever
