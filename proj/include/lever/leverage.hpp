#pragma once

#include "lever/densemat.hpp"
#include "lever/random.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace lever {

class QueryLedger;

enum class ScoreMode { exact, approximate };

/// Per-row leverage scores of a matrix, exact or (1 +- eps0)-perturbed.
struct LeverageProfile {
    std::vector<double> scores;
    ScoreMode mode = ScoreMode::exact;
    double eps0 = 0.0;
    std::size_t rank = 0;
    double score_sum = 0.0;
};

inline constexpr double kDefaultEps0 = 0.1;

/// sigma_i = ||U_i||^2 for an orthonormal basis U of the column space.
/// Charges one full pass (n rows) to `ledger` under stage "leverage" when given.
LeverageProfile exact_leverage_scores(const DenseMatrix& a, QueryLedger* ledger = nullptr);

/// Multiplies every exact score by an independent draw from U[1 - eps0, 1 + eps0].
/// Stands in for an estimator with a (1 +- eps0) multiplicative guarantee.
LeverageProfile approx_leverage_scores(const DenseMatrix& a, double eps0, Seed seed,
                                       QueryLedger* ledger = nullptr);

/// Applies the same perturbation to an already-computed exact profile.
LeverageProfile perturb_scores(const LeverageProfile& exact, double eps0, Seed seed);

/// sum_i 1 / (1 + lambda / s_i^2).
double statistical_dimension(const Vector& singular_values, double lambda);

/// First n rows of an orthonormal basis of [A; sqrt(lambda) I], built from the
/// SVD of A as U * S * (S^2 + lambda I)^(-1/2).
struct RidgeBasis {
    Matrix u1;                    // n x k, k = rank(A)
    double lambda = 0.0;
    Vector singular_values;       // of A, nonincreasing, length k
    double sd = 0.0;
    std::vector<double> ridge_scores;
    Vector shrink;                // diagonal of (S^T S + lambda I_d)^(-1/2), length d
    double spectral_norm_u1 = 0.0;
    double frob_sq_u1 = 0.0;

    /// Ridge scores as a profile (mode exact, score_sum = sd).
    LeverageProfile profile() const;
};

RidgeBasis ridge_basis(const DenseMatrix& a, double lambda, QueryLedger* ledger = nullptr);

/// The full (n + d) x d orthonormal matrix [U S D; V sqrt(lambda) D], using a
/// complete right singular basis so it stays orthonormal for rank-deficient A.
Matrix augmented_ridge_basis(const DenseMatrix& a, double lambda);

void write_profile_csv(std::ostream& out, const LeverageProfile& profile);
std::string ridge_summary_json(const RidgeBasis& basis);

} // namespace lever
