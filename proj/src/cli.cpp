#include "lever/cli.hpp"

#include "lever/bench.hpp"
#include "lever/leverage.hpp"
#include "lever/matrix_io.hpp"
#include "lever/qcost.hpp"
#include "lever/sketch.hpp"
#include "lever/solve.hpp"
#include "lever/verify.hpp"

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace lever::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

struct SolveArgs {
    std::string mode;
    std::string a_path;
    std::string b_path;
    double eps = 0.0;
    std::optional<double> lambda;
    Seed seed = 0;
    std::string scores = "exact";
    double eps0 = kDefaultEps0;
    std::optional<std::size_t> m;
    bool oracle = false;
    bool identity = false;
    std::string out_path;
};

struct VerifyArgs {
    std::string check;
    std::string a_path;
    std::string b_path;
    double eps = 0.0;
    std::optional<std::size_t> m;
    std::size_t trials = 1;
    Seed seed = 0;
    bool identity = false;
    double min_pass = kDefaultMinPass;
};

struct BenchArgs {
    std::string spec_path;
    std::optional<std::size_t> threads;
    bool no_timing = false;
    std::string out_path;
};

struct CostArgs {
    std::uint64_t n = 0;
    std::uint64_t d = 0;
    std::uint64_t big_n = 1;
    double eps = 0.0;
    double eps0 = kDefaultEps0;
    std::optional<std::uint64_t> r;
    std::optional<std::uint64_t> m;
    std::optional<double> lambda;
    std::string sd_from;
    std::optional<double> sd;
    double omega = kDefaultOmega;
    std::string log = "none";
    std::string sweep;
    bool json = false;
};

struct ProfileArgs {
    std::string a_path;
    std::string scores = "exact";
    double eps0 = kDefaultEps0;
    Seed seed = 0;
    std::optional<double> lambda;
    bool summary = false;
    std::optional<std::size_t> m;
    double eps = 0.5;
    std::string out_path;
};

Error invalid(const std::string& message) { return Error(ErrorCode::InvalidArgument, message); }

ScoresOptions parse_scores(const std::string& mode, double eps0) {
    ScoresOptions s;
    s.eps0 = eps0;
    if (mode == "exact") {
        s.mode = ScoreMode::exact;
    } else if (mode == "approx" || mode == "approximate") {
        s.mode = ScoreMode::approximate;
        if (!(eps0 > 0.0 && eps0 < 1.0)) throw Error(ErrorCode::Eps0OutOfRange, "eps0 must lie in (0, 1)");
    } else {
        throw invalid("--scores must be 'exact' or 'approx'");
    }
    return s;
}

// Writes to --out when given, otherwise to `out`.
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& write) {
    if (path.empty()) {
        write(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw invalid("cannot write " + path);
    write(file);
}

int cmd_solve(const SolveArgs& args, std::ostream& out) {
    if (args.mode != "linear" && args.mode != "multiple" && args.mode != "ridge") {
        throw invalid("--mode must be linear, multiple or ridge");
    }
    if (args.mode == "ridge" && !args.lambda) throw Error(ErrorCode::NegativeLambda, "ridge needs --lambda > 0");
    if (args.mode != "ridge" && args.lambda) throw invalid("--lambda applies to --mode ridge only");
    if (args.b_path.empty()) throw invalid("--b/--B is required");
    if (args.m && *args.m < 1) throw invalid("--m must be >= 1");

    SolveOptions opts;
    opts.sketch.seed = args.seed;
    opts.sketch.m = args.m;
    opts.scores = parse_scores(args.scores, args.eps0);
    opts.identity_sketch = args.identity;
    if (args.mode == "ridge" && !(*args.lambda > 0.0)) {
        throw Error(ErrorCode::NegativeLambda, "lambda must be positive; use --mode linear for lambda = 0");
    }

    const DenseMatrix a = read_matrix_file(args.a_path);
    const DenseMatrix b = read_matrix_file(args.b_path);

    ordered_json j;
    j["mode"] = args.mode;
    j["n"] = a.rows();
    j["d"] = a.cols();
    j["N"] = b.cols();
    j["eps"] = args.eps;

    RegressionSolution sol;
    std::optional<double> oracle_objective;
    std::optional<VerificationReport> ratio;
    if (args.mode == "ridge") {
        if (b.cols() != 1) throw Error(ErrorCode::DimensionMismatch, "ridge needs a single right-hand side");
        const RidgeProblem p{a, b.values().col(0), *args.lambda, args.eps};
        sol = solve_ridge(p, opts);
        j["lambda"] = *args.lambda;
        j["sd"] = *sol.sd;
        if (args.oracle) {
            const Vector x_star = exact_ridge(a, p.b, p.lambda);
            oracle_objective = ridge_objective(a.values(), p.b, x_star, p.lambda);
            ratio = objective_ratio(sol.objective, *oracle_objective, p.b.squaredNorm(), 1.0 + args.eps);
        }
    } else {
        const RegressionProblem p{a, b, args.eps,
                                  args.mode == "linear" ? RegressionMode::linear : RegressionMode::multiple};
        sol = args.mode == "linear" ? solve_linear(p, opts) : solve_multiple(p, opts);
        if (args.oracle) {
            const DenseMatrix x_star = exact_least_squares(a, b);
            oracle_objective = (a.values() * x_star.values() - b.values()).squaredNorm();
            ratio = approx_ratio(a.values(), b.values(), sol.X, x_star.values(), 1.0 + args.eps);
        }
    }

    j["m_used"] = sol.m_used;
    j["retries"] = sol.retries;
    j["seed"] = sol.seed;
    j["objective"] = sol.objective;
    if (oracle_objective) j["oracle_objective"] = *oracle_objective;
    if (ratio) {
        if (std::isfinite(ratio->statistic)) {
            j["ratio"] = ratio->statistic;
        } else {
            j["ratio"] = "inf";
            j["ratio_flag"] = ratio->details;
        }
    }
    j["row_queries_classical"] = sol.ledger.rows_read_classical();
    j["row_queries_quantum_model"] = sol.ledger.rows_quantum_model;
    ordered_json stages = ordered_json::object();
    for (const auto& s : sol.ledger.stages()) stages[s.name] = s.rows;
    j["stages"] = stages;

    if (!args.out_path.empty()) write_matrix_file(args.out_path, DenseMatrix(sol.X));
    out << j.dump() << '\n';
    return kExitOk;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out) {
    CheckKind kind;
    if (args.check == "se") {
        kind = CheckKind::SE;
    } else if (args.check == "famp") {
        kind = CheckKind::FAMP;
    } else if (args.check == "samp") {
        kind = CheckKind::SAMP;
    } else {
        throw invalid("--check must be se, famp or samp");
    }
    if (kind != CheckKind::SE && args.b_path.empty()) throw invalid("--check " + args.check + " needs --B");
    if (!(args.eps > 0.0)) throw Error(ErrorCode::EpsOutOfRange, "--eps must be positive");
    if (args.trials < 1) throw invalid("--trials must be >= 1");
    if (!args.identity && !args.m) throw invalid("--m is required unless --identity is given");
    if (args.m && *args.m < 1) throw invalid("--m must be >= 1");
    if (!(args.min_pass >= 0.0 && args.min_pass <= 1.0)) throw invalid("--min-pass must lie in [0, 1]");

    const DenseMatrix a = read_matrix_file(args.a_path);
    std::optional<DenseMatrix> b;
    if (!args.b_path.empty()) b = read_matrix_file(args.b_path);
    if (b && b->rows() != a.rows()) throw Error(ErrorCode::DimensionMismatch, "A and B row counts differ");

    const std::vector<double> q = build_distribution(exact_leverage_scores(a));
    const Matrix u = kind == CheckKind::SE ? orthonormal_basis(a).basis : Matrix();

    const TrialSummary summary = run_trials(kind, args.trials, args.seed, args.min_pass, [&](Seed seed) {
        const SketchOperator s = args.identity ? SketchOperator::identity(a.rows()) : draw_sketch(q, *args.m, seed);
        VerificationReport r;
        switch (kind) {
        case CheckKind::SE: r = check_se(u, s, args.eps); break;
        case CheckKind::FAMP: r = check_famp(a.values(), b->values(), s, args.eps); break;
        default: r = check_samp(a.values(), b->values(), s, args.eps); break;
        }
        r.seed = seed;
        return r;
    });
    out << summary.to_json() << '\n';
    return summary.passed() ? kExitOk : kExitCheckFailed;
}

int cmd_bench(const BenchArgs& args, std::ostream& out) {
    std::ifstream in(args.spec_path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + args.spec_path);
    std::stringstream text;
    text << in.rdbuf();
    const BenchSpec spec = parse_bench_spec(text.str());
    const std::size_t threads = args.threads && *args.threads > 0 ? *args.threads : bench_threads_from_env();
    const BenchResult result = run_bench(spec, threads);

    const BenchCsvOptions csv{!args.no_timing};
    emit(args.out_path, out, [&](std::ostream& o) {
        o << bench_csv_header(csv) << '\n' << bench_csv_body(result, csv) << bench_summary_line(result) << '\n';
    });
    return kExitOk;
}

struct SweepGrid {
    std::uint64_t start = 0;
    std::uint64_t end = 0;
    double factor = 0.0;
};

SweepGrid parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 4 || parts[0] != "n") throw invalid("--sweep must look like n:start:end:factor");
    SweepGrid g;
    try {
        g.start = std::stoull(parts[1]);
        g.end = std::stoull(parts[2]);
        g.factor = std::stod(parts[3]);
    } catch (const std::exception&) {
        throw invalid("--sweep must look like n:start:end:factor");
    }
    if (g.start < 1 || g.end < g.start || !(g.factor > 1.0)) {
        throw invalid("--sweep needs 1 <= start <= end and factor > 1");
    }
    return g;
}

int cmd_cost(const CostArgs& args, std::ostream& out) {
    CostModelInputs in;
    in.n = args.n;
    in.d = args.d;
    in.N = args.big_n;
    in.eps = args.eps;
    in.eps0 = args.eps0;
    in.r = args.r.value_or(args.d);
    in.omega = args.omega;
    in.m = args.m;
    in.lambda = args.lambda;
    in.log_policy = parse_log_policy(args.log);
    if (!args.sd_from.empty()) {
        if (!args.lambda) throw invalid("--sd-from needs --lambda");
        const DenseMatrix a = read_matrix_file(args.sd_from);
        in.sd = statistical_dimension(svd_factor(a).singular_values, *args.lambda);
    } else if (args.sd) {
        in.sd = args.sd;
    }
    in.validate();

    if (args.sweep.empty()) {
        const CostReport report = quantum_pipeline_cost(in);
        if (args.json) {
            out << cost_report_json(report) << '\n';
        } else {
            out << cost_csv_header() << '\n' << cost_csv_row(report) << '\n';
        }
        return kExitOk;
    }

    const SweepGrid grid = parse_sweep(args.sweep);
    const auto n_star = crossover(in);
    out << cost_csv_header() << ",marker\n";
    bool marked = false;
    for (double n = static_cast<double>(grid.start); n <= static_cast<double>(grid.end); n *= grid.factor) {
        CostModelInputs row = in;
        row.n = static_cast<std::uint64_t>(std::llround(n));
        const CostReport report = quantum_pipeline_cost(row);
        const bool advantage = report.rows_quantum < report.rows_classical;
        out << cost_csv_row(report) << ',' << (advantage && !marked ? "crossover" : "") << '\n';
        marked = marked || advantage;
    }
    out << "# crossover n*=" << (n_star ? std::to_string(*n_star) : std::string("NONE")) << '\n';
    return kExitOk;
}

std::optional<RidgeBasis> maybe_ridge(const DenseMatrix& a, const std::optional<double>& lambda) {
    if (!lambda) return std::nullopt;
    return ridge_basis(a, *lambda);
}

LeverageProfile load_profile(const ProfileArgs& args, const DenseMatrix& a, const std::optional<RidgeBasis>& ridge) {
    const ScoresOptions scores = parse_scores(args.scores, args.eps0);
    LeverageProfile exact = ridge ? ridge->profile() : exact_leverage_scores(a);
    if (scores.mode == ScoreMode::approximate) return perturb_scores(exact, scores.eps0, args.seed);
    return exact;
}

int cmd_leverage(const ProfileArgs& args, std::ostream& out) {
    const DenseMatrix a = read_matrix_file(args.a_path);
    const auto ridge = maybe_ridge(a, args.lambda);
    if (args.summary) {
        if (!ridge) throw invalid("--summary needs --lambda");
        emit(args.out_path, out, [&](std::ostream& o) { o << ridge_summary_json(*ridge) << '\n'; });
        return kExitOk;
    }
    const LeverageProfile profile = load_profile(args, a, ridge);
    emit(args.out_path, out, [&](std::ostream& o) { write_profile_csv(o, profile); });
    return kExitOk;
}

int cmd_sample(const ProfileArgs& args, std::ostream& out) {
    if (!(args.eps > 0.0 && args.eps < 1.0)) throw Error(ErrorCode::EpsOutOfRange, "--eps must lie in (0, 1)");
    if (args.m && *args.m < 1) throw invalid("--m must be >= 1");
    const DenseMatrix a = read_matrix_file(args.a_path);
    const auto ridge = maybe_ridge(a, args.lambda);
    const LeverageProfile profile = load_profile(args, a, ridge);
    const std::size_t m = args.m.value_or(
        recommended_m(a.cols(), args.eps, ridge ? std::optional<double>(ridge->sd) : std::nullopt));
    const SketchOperator s = draw_sketch(build_distribution(profile), m, derive_seed(args.seed, kSketchStream));
    emit(args.out_path, out, [&](std::ostream& o) { write_sketch_csv(o, s); });
    return kExitOk;
}

void write_error(std::ostream& err, const std::string& code, const std::string& message, int exit_code) {
    ordered_json j;
    j["error"] = code;
    j["message"] = message;
    j["exit_code"] = exit_code;
    err << j.dump() << '\n';
}

} // namespace

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::AllZeroMatrix:
    case ErrorCode::NonFiniteEntry:
    case ErrorCode::MalformedInput:
    case ErrorCode::NotOrthonormal:
    case ErrorCode::ZeroNormInput:
    case ErrorCode::AllZeroScores:
        return kExitMalformedInput;
    case ErrorCode::DimensionMismatch:
        return kExitDimensionMismatch;
    case ErrorCode::SketchRankCollapse:
        return kExitRankCollapse;
    case ErrorCode::NegativeLambda:
    case ErrorCode::Eps0OutOfRange:
    case ErrorCode::EpsOutOfRange:
    case ErrorCode::NonPositiveDimension:
    case ErrorCode::InvalidArgument:
        return kExitInvalidFlag;
    }
    return kExitInvalidFlag;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Leverage-score sketch-and-solve regression toolkit", "lever-sketch"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Sketched linear, multiple or ridge regression");
    solve_cmd->add_option("--mode", solve.mode, "linear | multiple | ridge")->required();
    solve_cmd->add_option("--A", solve.a_path, "design matrix CSV")->required();
    solve_cmd->add_option("--b,--B", solve.b_path, "right-hand side CSV");
    solve_cmd->add_option("--eps", solve.eps, "target accuracy in (0, 1)")->required();
    solve_cmd->add_option("--lambda", solve.lambda, "ridge regularization (> 0)");
    solve_cmd->add_option("--seed", solve.seed, "64-bit seed");
    solve_cmd->add_option("--scores", solve.scores, "exact | approx");
    solve_cmd->add_option("--eps0", solve.eps0, "score perturbation for --scores approx");
    solve_cmd->add_option("--m", solve.m, "override the sample count");
    solve_cmd->add_flag("--oracle", solve.oracle, "also run the exact solver and report the ratio");
    solve_cmd->add_flag("--identity", solve.identity, "use the identity sketch (S = I)");
    solve_cmd->add_option("--out", solve.out_path, "write the solution matrix as CSV");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Empirical SE / FAMP / SAMP checks over seeded trials");
    verify_cmd->add_option("--check", verify.check, "se | famp | samp")->required();
    verify_cmd->add_option("--A", verify.a_path, "matrix CSV")->required();
    verify_cmd->add_option("--B", verify.b_path, "second factor CSV (famp, samp)");
    verify_cmd->add_option("--eps", verify.eps, "threshold parameter")->required();
    verify_cmd->add_option("--m", verify.m, "samples per sketch");
    verify_cmd->add_option("--trials", verify.trials, "number of seeded trials");
    verify_cmd->add_option("--seed", verify.seed, "base seed");
    verify_cmd->add_flag("--identity", verify.identity, "use the identity sketch");
    verify_cmd->add_option("--min-pass", verify.min_pass, "required pass fraction");

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run a Monte Carlo benchmark described by a JSON spec");
    bench_cmd->add_option("spec", bench.spec_path, "bench spec JSON file")->required();
    bench_cmd->add_option("--threads", bench.threads, "worker threads (default: LEVER_SKETCH_THREADS)");
    bench_cmd->add_flag("--no-timing", bench.no_timing, "omit the wall_ms column");
    bench_cmd->add_option("--out", bench.out_path, "write CSV to a file");

    CostArgs cost;
    auto* cost_cmd = app.add_subcommand("cost", "Classical vs quantum-model row-query accounting");
    cost_cmd->add_option("--n", cost.n)->required();
    cost_cmd->add_option("--d", cost.d)->required();
    cost_cmd->add_option("--N", cost.big_n);
    cost_cmd->add_option("--eps", cost.eps)->required();
    cost_cmd->add_option("--eps0", cost.eps0);
    cost_cmd->add_option("--r", cost.r, "row sparsity (default d)");
    cost_cmd->add_option("--m", cost.m, "sample count; queries become sqrt(n m)");
    cost_cmd->add_option("--lambda", cost.lambda);
    cost_cmd->add_option("--sd-from", cost.sd_from, "matrix CSV to take sd_lambda from");
    cost_cmd->add_option("--sd", cost.sd, "statistical dimension given directly");
    cost_cmd->add_option("--omega", cost.omega);
    cost_cmd->add_option("--log", cost.log, "none | single");
    cost_cmd->add_option("--sweep", cost.sweep, "n:start:end:factor");
    cost_cmd->add_flag("--json", cost.json, "emit JSON instead of CSV");

    ProfileArgs lev;
    auto* lev_cmd = app.add_subcommand("leverage", "Dump leverage (or ridge leverage) scores as CSV");
    lev_cmd->add_option("--A", lev.a_path)->required();
    lev_cmd->add_option("--scores", lev.scores);
    lev_cmd->add_option("--eps0", lev.eps0);
    lev_cmd->add_option("--seed", lev.seed);
    lev_cmd->add_option("--lambda", lev.lambda, "ridge scores of [A; sqrt(lambda) I]");
    lev_cmd->add_flag("--summary", lev.summary, "print the ridge basis summary JSON");
    lev_cmd->add_option("--out", lev.out_path);

    ProfileArgs sample;
    auto* sample_cmd = app.add_subcommand("sample", "Draw a leverage-score sketch and dump it as CSV");
    sample_cmd->add_option("--A", sample.a_path)->required();
    sample_cmd->add_option("--m", sample.m);
    sample_cmd->add_option("--eps", sample.eps, "used for the recommended m");
    sample_cmd->add_option("--scores", sample.scores);
    sample_cmd->add_option("--eps0", sample.eps0);
    sample_cmd->add_option("--seed", sample.seed);
    sample_cmd->add_option("--lambda", sample.lambda);
    sample_cmd->add_option("--out", sample.out_path);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        write_error(err, "InvalidFlag", e.what(), kExitInvalidFlag);
        return kExitInvalidFlag;
    }

    try {
        if (*solve_cmd) return cmd_solve(solve, out);
        if (*verify_cmd) return cmd_verify(verify, out);
        if (*bench_cmd) return cmd_bench(bench, out);
        if (*cost_cmd) return cmd_cost(cost, out);
        if (*lev_cmd) return cmd_leverage(lev, out);
        if (*sample_cmd) return cmd_sample(sample, out);
    } catch (const Error& e) {
        const int code = exit_code_for(e.code());
        write_error(err, std::string(to_string(e.code())), e.what(), code);
        return code;
    }
    return kExitInvalidFlag;
}

} // namespace lever::cli
