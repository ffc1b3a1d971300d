#pragma once

// Sketch-and-solve regression: sample rows by leverage score, solve the
// m-row problem exactly, report the objective on the full problem.

#include "lever/densemat.hpp"
#include "lever/leverage.hpp"
#include "lever/qcost.hpp"
#include "lever/sketch.hpp"

#include <optional>

namespace lever {

enum class RegressionMode { linear, multiple };

struct RegressionProblem {
    DenseMatrix A;
    DenseMatrix B;
    double eps = 0.25;
    RegressionMode mode = RegressionMode::multiple;

    void validate() const;
};

struct RidgeProblem {
    DenseMatrix A;
    Vector b;
    double lambda = 1.0;
    double eps = 0.25;

    void validate() const;
};

struct ScoresOptions {
    ScoreMode mode = ScoreMode::exact;
    double eps0 = kDefaultEps0;
};

struct SolveOptions {
    SketchConfig sketch;
    ScoresOptions scores;
    bool identity_sketch = false;  // S = I_n, for oracle-equivalence checks
};

struct RegressionSolution {
    Matrix X;                 // d x N (d x 1 for linear and ridge)
    double objective = 0.0;   // on the full problem
    std::size_t m_used = 0;
    std::size_t retries = 0;
    Seed seed = 0;
    QueryLedger ledger;
    std::optional<double> sd; // ridge only
};

/// Retries (fresh derived seeds) allowed after the first draw when rank(SA) < rank(A).
inline constexpr std::size_t kMaxSketchRetries = 3;

RegressionSolution solve_multiple(const RegressionProblem& p, const SolveOptions& opts = {});

/// solve_multiple restricted to a single right-hand side.
RegressionSolution solve_linear(const RegressionProblem& p, const SolveOptions& opts = {});

RegressionSolution solve_ridge(const RidgeProblem& p, const SolveOptions& opts = {});

/// ||A x - b||^2 + lambda ||x||^2.
double ridge_objective(const Matrix& a, const Vector& b, const Vector& x, double lambda);

} // namespace lever
