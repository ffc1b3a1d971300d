#include "lever/qcost.hpp"

#include "lever/error.hpp"
#include "lever/matrix_io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace lever {

std::string to_string(LogPolicy policy) {
    return policy == LogPolicy::none ? "none" : "single";
}

LogPolicy parse_log_policy(const std::string& text) {
    if (text == "none") return LogPolicy::none;
    if (text == "single" || text == "single_log") return LogPolicy::single_log;
    throw Error(ErrorCode::InvalidArgument, "log policy must be 'none' or 'single', got '" + text + "'");
}

void QueryLedger::record(const std::string& stage, std::uint64_t rows) {
    auto it = std::find_if(stages_.begin(), stages_.end(), [&](const Stage& s) { return s.name == stage; });
    if (it == stages_.end()) {
        stages_.push_back({stage, rows});
    } else {
        it->rows += rows;
    }
    total_ += rows;
}

std::uint64_t QueryLedger::stage_rows(const std::string& stage) const {
    auto it = std::find_if(stages_.begin(), stages_.end(), [&](const Stage& s) { return s.name == stage; });
    return it == stages_.end() ? 0 : it->rows;
}

void QueryLedger::merge(const QueryLedger& other) {
    for (const auto& s : other.stages_) record(s.name, s.rows);
    rows_quantum_model += other.rows_quantum_model;
}

double tmat(std::int64_t a, std::int64_t b, std::int64_t c, double omega) {
    if (a < 1 || b < 1 || c < 1) {
        throw Error(ErrorCode::NonPositiveDimension, "tmat dimensions must be positive");
    }
    std::array<double, 3> dims{static_cast<double>(a), static_cast<double>(b), static_cast<double>(c)};
    std::sort(dims.begin(), dims.end());
    // Sorting first makes the value bitwise identical under every permutation.
    return dims[1] * dims[2] * std::pow(dims[0], omega - 2.0);
}

void CostModelInputs::validate() const {
    if (n < 1 || d < 1 || N < 1) throw Error(ErrorCode::NonPositiveDimension, "n, d, N must be positive");
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::EpsOutOfRange, "eps must lie in (0, 1)");
    if (!(eps0 > 0.0 && eps0 < 1.0)) throw Error(ErrorCode::Eps0OutOfRange, "eps0 must lie in (0, 1)");
    if (r < 1 || r > d) throw Error(ErrorCode::InvalidArgument, "row sparsity must satisfy 1 <= r <= d");
    if (!(omega >= 2.0 && omega <= 3.0)) throw Error(ErrorCode::InvalidArgument, "omega must lie in [2, 3]");
    if (m && *m < 1) throw Error(ErrorCode::NonPositiveDimension, "m must be positive");
    if (lambda && !(*lambda > 0.0)) throw Error(ErrorCode::NegativeLambda, "lambda must be positive");
    if (sd && !(*sd > 0.0)) throw Error(ErrorCode::InvalidArgument, "sd must be positive");
}

CostReport quantum_pipeline_cost(const CostModelInputs& in) {
    in.validate();
    CostReport out;
    out.inputs = in;

    const double n = static_cast<double>(in.n);
    const double d = static_cast<double>(in.d);
    const double big_n = static_cast<double>(in.N);
    const double r = static_cast<double>(in.r);
    const double dim = in.sd ? *in.sd : d;
    const double log_factor = in.log_policy == LogPolicy::single_log ? std::log2(n + 2.0) : 1.0;

    out.rows_classical = n;
    const double rows = in.m ? std::sqrt(n * static_cast<double>(*in.m)) : std::sqrt(n * dim) / in.eps;
    out.rows_quantum = rows * log_factor;

    const double d_omega = std::pow(d, in.omega);
    out.time_sampling = log_factor * r * std::sqrt(n * dim) / in.eps;
    out.time_solve = log_factor * d_omega / in.eps;
    out.time_multiple = in.N > 1 ? log_factor * big_n * std::pow(d, in.omega - 1.0) / in.eps : 0.0;
    out.time_quantum = out.time_sampling + out.time_solve + out.time_multiple;
    out.time_linear_d15 = log_factor * (std::sqrt(n) * std::pow(d, 1.5) / in.eps + d_omega / in.eps);
    out.time_sampling_tool = log_factor * (r * std::sqrt(n * dim) / in.eps + d_omega);
    out.time_leverage_estimation =
        log_factor * (r * std::sqrt(n * d) / in.eps0 + d_omega / (in.eps0 * in.eps0) +
                      d * d / std::pow(in.eps0, 4.0));
    return out;
}

std::optional<std::uint64_t> crossover(const CostModelInputs& in) {
    CostModelInputs probe = in;
    for (int e = 0; e <= kCrossoverMaxExponent; ++e) {
        probe.n = std::uint64_t{1} << e;
        const CostReport report = quantum_pipeline_cost(probe);
        if (report.rows_quantum < report.rows_classical) return probe.n;
    }
    return std::nullopt;
}

std::string cost_csv_header() {
    return "n,d,N,eps,lambda,sd,rows_classical,rows_quantum,time_quantum_terms,log_policy";
}

std::string cost_csv_row(const CostReport& report) {
    const auto& in = report.inputs;
    std::ostringstream out;
    out << in.n << ',' << in.d << ',' << in.N << ',' << format_double(in.eps) << ','
        << (in.lambda ? format_double(*in.lambda) : "") << ',' << (in.sd ? format_double(*in.sd) : "") << ','
        << format_double(report.rows_classical) << ',' << format_double(report.rows_quantum) << ','
        << "sampling=" << format_double(report.time_sampling) << ";solve=" << format_double(report.time_solve)
        << ";multiple=" << format_double(report.time_multiple) << ";total=" << format_double(report.time_quantum)
        << ";linear_d15=" << format_double(report.time_linear_d15)
        << ";sampling_tool=" << format_double(report.time_sampling_tool)
        << ";leverage_estimation=" << format_double(report.time_leverage_estimation) << ','
        << to_string(in.log_policy);
    return out.str();
}

std::string cost_report_json(const CostReport& report) {
    const auto& in = report.inputs;
    nlohmann::ordered_json j;
    j["model"] = "quantum query/time model, leading terms with constant 1";
    j["n"] = in.n;
    j["d"] = in.d;
    j["N"] = in.N;
    j["eps"] = in.eps;
    j["eps0"] = in.eps0;
    j["r"] = in.r;
    j["omega"] = in.omega;
    if (in.m) j["m"] = *in.m;
    if (in.lambda) j["lambda"] = *in.lambda;
    if (in.sd) j["sd"] = *in.sd;
    j["log_policy"] = to_string(in.log_policy);
    j["rows_classical"] = report.rows_classical;
    j["rows_quantum"] = report.rows_quantum;
    j["time_terms"] = {
        {"sampling", report.time_sampling},
        {"solve", report.time_solve},
        {"multiple", report.time_multiple},
        {"total", report.time_quantum},
        {"linear_d15", report.time_linear_d15},
        {"sampling_tool", report.time_sampling_tool},
        {"leverage_estimation", report.time_leverage_estimation},
    };
    return j.dump();
}

} // namespace lever
