#pragma once

// Leverage-score sampling: the distribution q, i.i.d. with-replacement draws,
// and the m x n sampling-and-rescaling operator S (row t = w_t * e_{i_t}^T).

#include "lever/densemat.hpp"
#include "lever/leverage.hpp"
#include "lever/random.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

namespace lever {

class QueryLedger;

struct SketchConfig {
    double oversample_c = 1.0;
    std::optional<std::size_t> m;  // overrides recommended_m when set
    double c_se = 40.0;            // multiplier of the d ln d term
    double c_amp = 40.0;           // multiplier of the d / eps term
    Seed seed = 0;

    void validate() const;
};

struct Sample {
    std::size_t index = 0;
    double weight = 0.0;

    friend bool operator==(const Sample&, const Sample&) = default;
};

class SketchOperator {
public:
    SketchOperator(std::size_t source_rows, std::vector<Sample> samples, std::vector<double> q, Seed seed = 0);

    /// m = n, every row once with weight 1 and q uniform (so S^T S = I_n).
    static SketchOperator identity(std::size_t n);

    std::size_t source_rows() const noexcept { return source_rows_; }
    std::size_t m() const noexcept { return samples_.size(); }
    const std::vector<Sample>& samples() const noexcept { return samples_; }
    const std::vector<double>& distribution() const noexcept { return q_; }
    Seed seed() const noexcept { return seed_; }

    /// Dense m x n form, for tests on small n only.
    Matrix to_dense() const;

private:
    std::size_t source_rows_;
    std::vector<Sample> samples_;
    std::vector<double> q_;
    Seed seed_;
};

/// Normalizes scores into a sampling distribution. Approximate profiles are
/// inflated by 1 / (1 - eps0) first so q dominates the true distribution.
std::vector<double> build_distribution(const LeverageProfile& profile);

/// m i.i.d. inverse-CDF draws from q with weights 1 / sqrt(m q_i).
SketchOperator draw_sketch(const std::vector<double>& q, std::size_t m, Seed seed);

/// Row t of the result is w_t * M[i_t, :]. Charges m row reads to stage "sketch".
Matrix apply_sketch(const SketchOperator& s, const Matrix& m, QueryLedger* ledger = nullptr);
inline Matrix apply_sketch(const SketchOperator& s, const DenseMatrix& m, QueryLedger* ledger = nullptr) {
    return apply_sketch(s, m.values(), ledger);
}

/// ceil(c_se * k ln(k + 2) + c_amp * k / eps), k = d or, for ridge, sd.
std::size_t recommended_m(std::size_t d, double eps, std::optional<double> sd = std::nullopt,
                          const SketchConfig& cfg = {});

/// FNV-1a over the bit patterns of q.
std::uint64_t distribution_hash(const std::vector<double>& q);

void write_sketch_csv(std::ostream& out, const SketchOperator& s);

} // namespace lever
