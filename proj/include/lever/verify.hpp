#pragma once

// Empirical checks of the subspace-embedding and approximate-matrix-product
// properties for a concrete sketch, and approximation ratios against exact
// oracles.

#include "lever/densemat.hpp"
#include "lever/random.hpp"
#include "lever/sketch.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lever {

enum class CheckKind { SE, FAMP, SAMP, ratio };

std::string to_string(CheckKind kind);

struct VerificationReport {
    CheckKind kind = CheckKind::SE;
    double statistic = 0.0;
    double threshold = 0.0;
    bool passed = false;
    std::size_t trials = 1;
    Seed seed = 0;
    std::string details;

    std::string to_json() const;
};

/// ||(SU)^T (SU) - I||; passes when <= eps. U must be orthonormal to 1e-8.
VerificationReport check_se(const Matrix& u, const SketchOperator& s, double eps);

/// ||(SA)^T (SB) - A^T B||_F^2 / (||A||_F^2 ||B||_F^2); passes when <= eps^2.
VerificationReport check_famp(const Matrix& a, const Matrix& b, const SketchOperator& s, double eps);

/// ||(SA)^T (SB) - A^T B|| / (||A|| ||B||); passes when <= eps.
VerificationReport check_samp(const Matrix& a, const Matrix& b, const SketchOperator& s, double eps);

/// ||A X_c - B||_F^2 / ||A X* - B||_F^2, with an explicit rule when the
/// optimal residual vanishes. `threshold` is the ratio the caller will accept.
VerificationReport approx_ratio(const Matrix& a, const Matrix& b, const Matrix& candidate, const Matrix& oracle,
                                double threshold = 1.0);

/// Ratio of precomputed objectives, same consistent-system rule as approx_ratio.
VerificationReport objective_ratio(double candidate_objective, double oracle_objective, double scale_sq,
                                   double threshold);

inline constexpr double kDefaultMinPass = 0.95;

struct TrialSummary {
    CheckKind kind = CheckKind::SE;
    std::vector<VerificationReport> reports;
    std::size_t passes = 0;
    double min_pass = kDefaultMinPass;

    std::size_t trials() const noexcept { return reports.size(); }
    double pass_fraction() const noexcept {
        return reports.empty() ? 0.0 : static_cast<double>(passes) / static_cast<double>(reports.size());
    }
    bool passed() const noexcept { return pass_fraction() >= min_pass; }

    std::string to_json() const;
};

/// Runs `trial(seed)` for seeds derive_seed(base_seed, t), t = 0..trials-1.
/// Results are collected in trial order.
TrialSummary run_trials(CheckKind kind, std::size_t trials, Seed base_seed, double min_pass,
                        const std::function<VerificationReport(Seed)>& trial);

} // namespace lever
