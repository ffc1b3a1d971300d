#include "lever/verify.hpp"

#include "lever/error.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace lever {

namespace {

void require_rows(const Matrix& m, const SketchOperator& s, const char* name) {
    if (static_cast<std::size_t>(m.rows()) != s.source_rows()) {
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(name) + " has " + std::to_string(m.rows()) + " rows, sketch expects " +
                        std::to_string(s.source_rows()));
    }
}

void require_amp_inputs(const Matrix& a, const Matrix& b, const SketchOperator& s) {
    require_rows(a, s, "A");
    require_rows(b, s, "B");
    if (a.squaredNorm() == 0.0 || b.squaredNorm() == 0.0) {
        throw Error(ErrorCode::ZeroNormInput, "approximate matrix product needs nonzero A and B");
    }
}

nlohmann::ordered_json report_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["kind"] = to_string(r.kind);
    if (std::isfinite(r.statistic)) {
        j["statistic"] = r.statistic;
    } else {
        j["statistic"] = "inf";
    }
    j["threshold"] = r.threshold;
    j["passed"] = r.passed;
    j["trials"] = r.trials;
    j["seed"] = r.seed;
    if (!r.details.empty()) j["details"] = r.details;
    return j;
}

} // namespace

std::string to_string(CheckKind kind) {
    switch (kind) {
    case CheckKind::SE: return "SE";
    case CheckKind::FAMP: return "FAMP";
    case CheckKind::SAMP: return "SAMP";
    case CheckKind::ratio: return "ratio";
    }
    return "unknown";
}

std::string VerificationReport::to_json() const { return report_json(*this).dump(); }

VerificationReport check_se(const Matrix& u, const SketchOperator& s, double eps) {
    require_rows(u, s, "U");
    const Eigen::Index k = u.cols();
    const double orth_err = (u.transpose() * u - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
    if (orth_err > 1e-8) {
        std::ostringstream msg;
        msg << "max |U^T U - I| = " << orth_err;
        throw Error(ErrorCode::NotOrthonormal, msg.str());
    }
    const Matrix su = apply_sketch(s, u);
    VerificationReport r;
    r.kind = CheckKind::SE;
    r.statistic = spectral_norm(Matrix(su.transpose() * su - Matrix::Identity(k, k)));
    r.threshold = eps;
    r.passed = r.statistic <= eps;
    r.seed = s.seed();
    return r;
}

VerificationReport check_famp(const Matrix& a, const Matrix& b, const SketchOperator& s, double eps) {
    require_amp_inputs(a, b, s);
    const Matrix sa = apply_sketch(s, a);
    const Matrix sb = apply_sketch(s, b);
    const Matrix err = sa.transpose() * sb - a.transpose() * b;
    VerificationReport r;
    r.kind = CheckKind::FAMP;
    r.statistic = err.squaredNorm() / (a.squaredNorm() * b.squaredNorm());
    r.threshold = eps * eps;
    r.passed = r.statistic <= r.threshold;
    r.seed = s.seed();
    return r;
}

VerificationReport check_samp(const Matrix& a, const Matrix& b, const SketchOperator& s, double eps) {
    require_amp_inputs(a, b, s);
    const Matrix sa = apply_sketch(s, a);
    const Matrix sb = apply_sketch(s, b);
    const Matrix err = sa.transpose() * sb - a.transpose() * b;
    VerificationReport r;
    r.kind = CheckKind::SAMP;
    r.statistic = spectral_norm(err) / (spectral_norm(a) * spectral_norm(b));
    r.threshold = eps;
    r.passed = r.statistic <= eps;
    r.seed = s.seed();
    return r;
}

VerificationReport objective_ratio(double candidate_objective, double oracle_objective, double scale_sq,
                                   double threshold) {
    VerificationReport r;
    r.kind = CheckKind::ratio;
    r.threshold = threshold;
    if (oracle_objective <= 1e-14 * scale_sq) {
        if (candidate_objective <= 1e-12 * scale_sq) {
            r.statistic = 1.0;
        } else {
            r.statistic = std::numeric_limits<double>::infinity();
            r.details = "ConsistentSystemMiss";
        }
    } else {
        r.statistic = candidate_objective / oracle_objective;
    }
    r.passed = r.statistic <= threshold;
    return r;
}

VerificationReport approx_ratio(const Matrix& a, const Matrix& b, const Matrix& candidate, const Matrix& oracle,
                                double threshold) {
    if (a.rows() != b.rows() || candidate.rows() != a.cols() || oracle.rows() != a.cols() ||
        candidate.cols() != b.cols() || oracle.cols() != b.cols()) {
        throw Error(ErrorCode::DimensionMismatch, "approx_ratio: inconsistent shapes");
    }
    const double cand = (a * candidate - b).squaredNorm();
    const double best = (a * oracle - b).squaredNorm();
    return objective_ratio(cand, best, b.squaredNorm(), threshold);
}

std::string TrialSummary::to_json() const {
    nlohmann::ordered_json j;
    j["check"] = to_string(kind);
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(report_json(r));
    j["trials"] = arr;
    j["aggregate"] = {
        {"trials", trials()},
        {"passes", passes},
        {"pass_fraction", pass_fraction()},
        {"min_pass", min_pass},
        {"passed", passed()},
    };
    return j.dump();
}

TrialSummary run_trials(CheckKind kind, std::size_t trials, Seed base_seed, double min_pass,
                        const std::function<VerificationReport(Seed)>& trial) {
    if (trials < 1) throw Error(ErrorCode::InvalidArgument, "trials must be >= 1");
    TrialSummary out;
    out.kind = kind;
    out.min_pass = min_pass;
    out.reports.reserve(trials);
    for (std::size_t t = 0; t < trials; ++t) {
        VerificationReport r = trial(derive_seed(base_seed, t));
        if (r.passed) ++out.passes;
        out.reports.push_back(std::move(r));
    }
    return out;
}

} // namespace lever
