#include "lever/bench.hpp"

#include "lever/error.hpp"
#include "lever/matrix_io.hpp"
#include "lever/verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace lever {

void BenchSpec::validate() const {
    if (n < 1 || d < 1 || N < 1) throw Error(ErrorCode::NonPositiveDimension, "n, d, N must be positive");
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::EpsOutOfRange, "eps must lie in (0, 1)");
    if (lambda && lambda_rel) throw Error(ErrorCode::InvalidArgument, "give lambda or lambda_rel, not both");
    if ((lambda && !(*lambda > 0.0)) || (lambda_rel && !(*lambda_rel > 0.0))) {
        throw Error(ErrorCode::NegativeLambda, "lambda must be positive");
    }
    if (is_ridge() && N != 1) throw Error(ErrorCode::InvalidArgument, "ridge benchmarks need N = 1");
    if (scores.mode == ScoreMode::approximate && !(scores.eps0 > 0.0 && scores.eps0 < 1.0)) {
        throw Error(ErrorCode::Eps0OutOfRange, "eps0 must lie in (0, 1)");
    }
    if (m && *m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
    if (!(residual_fraction >= 0.0)) throw Error(ErrorCode::InvalidArgument, "residual_fraction must be >= 0");
}

BenchSpec parse_bench_spec(const std::string& json_text) {
    static const std::set<std::string> known{"generator", "n", "d", "N", "eps", "lambda", "lambda_rel",
                                             "trials", "base_seed", "scores", "eps0", "m", "residual_fraction"};
    BenchSpec spec;
    try {
        const auto j = nlohmann::json::parse(json_text);
        if (!j.is_object()) throw Error(ErrorCode::MalformedInput, "bench spec must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (!known.contains(key)) throw Error(ErrorCode::MalformedInput, "unknown bench spec key '" + key + "'");
        }
        if (j.contains("generator")) spec.generator = parse_generator(j.at("generator").get<std::string>());
        if (j.contains("n")) spec.n = j.at("n").get<std::size_t>();
        if (j.contains("d")) spec.d = j.at("d").get<std::size_t>();
        if (j.contains("N")) spec.N = j.at("N").get<std::size_t>();
        if (j.contains("eps")) spec.eps = j.at("eps").get<double>();
        if (j.contains("lambda")) spec.lambda = j.at("lambda").get<double>();
        if (j.contains("lambda_rel")) spec.lambda_rel = j.at("lambda_rel").get<double>();
        if (j.contains("trials")) spec.trials = j.at("trials").get<std::size_t>();
        if (j.contains("base_seed")) spec.base_seed = j.at("base_seed").get<Seed>();
        if (j.contains("scores")) {
            const auto mode = j.at("scores").get<std::string>();
            if (mode == "exact") {
                spec.scores.mode = ScoreMode::exact;
            } else if (mode == "approximate" || mode == "approx") {
                spec.scores.mode = ScoreMode::approximate;
            } else {
                throw Error(ErrorCode::MalformedInput, "scores must be 'exact' or 'approximate'");
            }
        }
        if (j.contains("eps0")) spec.scores.eps0 = j.at("eps0").get<double>();
        if (j.contains("m")) spec.m = j.at("m").get<std::size_t>();
        if (j.contains("residual_fraction")) spec.residual_fraction = j.at("residual_fraction").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedInput, std::string("bench spec: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedInput) throw;
        throw Error(ErrorCode::MalformedInput, e.what());
    }
    spec.validate();
    return spec;
}

std::size_t bench_threads_from_env() {
    const char* env = std::getenv("LEVER_SKETCH_THREADS");
    std::size_t threads = 0;
    if (env != nullptr && *env != '\0') {
        char* end = nullptr;
        const unsigned long parsed = std::strtoul(env, &end, 10);
        if (end != nullptr && *end == '\0') threads = parsed;
    }
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    return threads;
}

BenchResult run_bench(const BenchSpec& spec, std::size_t threads) {
    spec.validate();
    const RegressionInstance inst =
        make_instance(spec.generator, spec.n, spec.d, spec.N, derive_seed(spec.base_seed, kInstanceStream),
                      spec.residual_fraction);

    BenchResult result;
    result.spec = spec;
    const double scale_sq = inst.B.values().squaredNorm();

    std::optional<RidgeProblem> ridge;
    std::optional<RegressionProblem> plain;
    if (spec.is_ridge()) {
        const double lambda =
            spec.lambda ? *spec.lambda : *spec.lambda_rel * std::pow(spectral_norm(inst.A), 2.0);
        ridge = RidgeProblem{inst.A, inst.B.values().col(0), lambda, spec.eps};
        const Vector x_star = exact_ridge(inst.A, ridge->b, lambda);
        result.oracle_objective = ridge_objective(inst.A.values(), ridge->b, x_star, lambda);
        result.lambda = lambda;
    } else {
        plain = RegressionProblem{inst.A, inst.B, spec.eps,
                                  spec.N == 1 ? RegressionMode::linear : RegressionMode::multiple};
        const DenseMatrix x_star = exact_least_squares(inst.A, inst.B);
        result.oracle_objective = (inst.A.values() * x_star.values() - inst.B.values()).squaredNorm();
    }

    result.rows.resize(spec.trials);
    std::vector<std::optional<double>> sds(spec.trials);
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        try {
            for (std::size_t t = next++; t < spec.trials; t = next++) {
                const auto start = std::chrono::steady_clock::now();
                BenchRow row;
                row.trial = t;
                row.seed = derive_seed(spec.base_seed, t);
                SolveOptions opts;
                opts.sketch.seed = row.seed;
                opts.sketch.m = spec.m;
                opts.scores = spec.scores;
                try {
                    const RegressionSolution sol = ridge ? solve_ridge(*ridge, opts) : solve_multiple(*plain, opts);
                    row.m = sol.m_used;
                    row.retries = sol.retries;
                    row.ratio = objective_ratio(sol.objective, result.oracle_objective, scale_sq, 1.0 + spec.eps).statistic;
                    row.rows_classical = sol.ledger.rows_read_classical();
                    row.rows_quantum_model = sol.ledger.rows_quantum_model;
                    sds[t] = sol.sd;
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::SketchRankCollapse) throw;
                    row.m = spec.m.value_or(recommended_m(spec.d, spec.eps));
                    row.retries = kMaxSketchRetries;
                    row.ratio = std::numeric_limits<double>::infinity();
                }
                row.passed = row.ratio <= 1.0 + spec.eps;
                row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
                result.rows[t] = row;
            }
        } catch (...) {
            const std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = spec.trials;
        }
    };

    threads = std::max<std::size_t>(1, std::min(threads, spec.trials));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& row : result.rows) result.passes += row.passed ? 1 : 0;
    if (!sds.empty()) result.sd = sds.front();
    return result;
}

std::string bench_csv_header(const BenchCsvOptions& opts) {
    std::string h = "trial,seed,m,retries,ratio,passed,rows_classical,rows_quantum_model";
    if (opts.timing) h += ",wall_ms";
    return h;
}

std::string bench_csv_body(const BenchResult& result, const BenchCsvOptions& opts) {
    std::ostringstream out;
    for (const auto& row : result.rows) {
        out << row.trial << ',' << row.seed << ',' << row.m << ',' << row.retries << ','
            << (std::isfinite(row.ratio) ? format_double(row.ratio) : std::string("inf")) << ','
            << (row.passed ? 1 : 0) << ',' << row.rows_classical << ',' << format_double(row.rows_quantum_model);
        if (opts.timing) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", row.wall_ms);
            out << ',' << buf;
        }
        out << '\n';
    }
    return out.str();
}

std::string bench_summary_line(const BenchResult& result) {
    std::ostringstream out;
    out << "# summary generator=" << to_string(result.spec.generator) << " n=" << result.spec.n
        << " d=" << result.spec.d << " N=" << result.spec.N << " eps=" << format_double(result.spec.eps);
    if (result.lambda) out << " lambda=" << format_double(*result.lambda);
    if (result.sd) out << " sd=" << format_double(*result.sd);
    out << " passed=" << result.passes << '/' << result.rows.size()
        << " pass_fraction=" << format_double(result.pass_fraction())
        << " oracle_objective=" << format_double(result.oracle_objective);
    return out.str();
}

} // namespace lever
