#include "lever/sketch.hpp"

#include "lever/error.hpp"
#include "lever/matrix_io.hpp"
#include "lever/qcost.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

namespace lever {

void SketchConfig::validate() const {
    if (!(oversample_c >= 1.0) || !(c_se >= 1.0) || !(c_amp >= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "sketch constants must be >= 1");
    }
    if (m && *m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
}

SketchOperator::SketchOperator(std::size_t source_rows, std::vector<Sample> samples, std::vector<double> q,
                               Seed seed)
    : source_rows_(source_rows), samples_(std::move(samples)), q_(std::move(q)), seed_(seed) {
    if (q_.size() != source_rows_) {
        throw Error(ErrorCode::DimensionMismatch, "distribution length must equal source rows");
    }
    for (const Sample& s : samples_) {
        if (s.index >= source_rows_) {
            throw Error(ErrorCode::DimensionMismatch, "sample index out of range");
        }
    }
}

SketchOperator SketchOperator::identity(std::size_t n) {
    std::vector<Sample> samples(n);
    for (std::size_t i = 0; i < n; ++i) samples[i] = {i, 1.0};
    return SketchOperator(n, std::move(samples), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Matrix SketchOperator::to_dense() const {
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(m()), static_cast<Eigen::Index>(source_rows_));
    for (std::size_t t = 0; t < samples_.size(); ++t) {
        out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(samples_[t].index)) = samples_[t].weight;
    }
    return out;
}

std::vector<double> build_distribution(const LeverageProfile& profile) {
    const double inflate = profile.mode == ScoreMode::approximate ? 1.0 / (1.0 - profile.eps0) : 1.0;
    std::vector<double> q(profile.scores.size());
    double total = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        q[i] = std::max(0.0, profile.scores[i]) * inflate;
        total += q[i];
    }
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroScores, "no positive leverage score");
    for (double& v : q) v /= total;
    return q;
}

SketchOperator draw_sketch(const std::vector<double>& q, std::size_t m, Seed seed) {
    if (m < 1) throw Error(ErrorCode::InvalidArgument, "m must be >= 1");
    if (q.empty()) throw Error(ErrorCode::InvalidArgument, "empty distribution");

    std::vector<double> cdf(q.size());
    std::partial_sum(q.begin(), q.end(), cdf.begin());
    const double total = cdf.back();
    if (!(total > 0.0)) throw Error(ErrorCode::AllZeroScores, "distribution has no mass");

    RandomStream stream(seed);
    const double md = static_cast<double>(m);
    std::vector<Sample> samples(m);
    for (auto& sample : samples) {
        const double x = stream.uniform01() * total;
        // First index with cdf > x; zero-probability rows can never be hit.
        auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
        if (it == cdf.end()) it = std::prev(cdf.end());
        auto i = static_cast<std::size_t>(std::distance(cdf.begin(), it));
        while (q[i] <= 0.0 && i > 0) --i;
        sample.index = i;
        sample.weight = 1.0 / std::sqrt(md * q[i]);
    }
    return SketchOperator(q.size(), std::move(samples), q, seed);
}

Matrix apply_sketch(const SketchOperator& s, const Matrix& m, QueryLedger* ledger) {
    if (static_cast<std::size_t>(m.rows()) != s.source_rows()) {
        throw Error(ErrorCode::DimensionMismatch, "sketch expects " + std::to_string(s.source_rows()) +
                                                       " rows, matrix has " + std::to_string(m.rows()));
    }
    Matrix out(static_cast<Eigen::Index>(s.m()), m.cols());
    const auto& samples = s.samples();
    for (std::size_t t = 0; t < samples.size(); ++t) {
        out.row(static_cast<Eigen::Index>(t)) = samples[t].weight * m.row(static_cast<Eigen::Index>(samples[t].index));
    }
    if (ledger) ledger->record("sketch", s.m());
    return out;
}

std::size_t recommended_m(std::size_t d, double eps, std::optional<double> sd, const SketchConfig& cfg) {
    if (!(eps > 0.0 && eps < 1.0)) throw Error(ErrorCode::EpsOutOfRange, "eps must lie in (0, 1)");
    if (d < 1) throw Error(ErrorCode::NonPositiveDimension, "d must be >= 1");
    const double k = sd ? *sd : static_cast<double>(d);
    const double m = std::ceil(cfg.c_se * k * std::log(k + 2.0) + cfg.c_amp * k / eps);
    return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

std::uint64_t distribution_hash(const std::vector<double>& q) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (double v : q) {
        auto bits = std::bit_cast<std::uint64_t>(v);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

void write_sketch_csv(std::ostream& out, const SketchOperator& s) {
    out << "# m=" << s.m() << " seed=" << s.seed() << " q_hash=" << distribution_hash(s.distribution()) << '\n';
    for (std::size_t t = 0; t < s.m(); ++t) {
        const Sample& sample = s.samples()[t];
        out << t << ',' << sample.index << ',' << format_double(sample.weight) << '\n';
    }
}

} // namespace lever
