#pragma once

#include "voxfract/rng.hpp"

#include <cstddef>
#include <span>

namespace voxfract
{

struct RankSumResult
{
    std::size_t n_a = 0;
    std::size_t n_b = 0;
    double W = 0.0; // rank sum of sample a, midranks for ties
    double U = 0.0; // W - n_a (n_a + 1) / 2
    double p = 1.0; // two-sided
    bool exact = false;
};

/// Wilcoxon rank-sum test. Exact enumeration of every assignment of the
/// pooled midranks when n_a + n_b <= 12, otherwise the normal approximation
/// with tie and continuity corrections. Throws std::invalid_argument when a
/// sample has fewer than three values or a value is not finite.
RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b);

inline constexpr std::size_t kExactRankSumLimit = 12;

struct Interval
{
    double mean = 0.0;
    double low = 0.0;
    double high = 0.0;

    double half_width() const { return 0.5 * (high - low); }
};

/// Percentile bootstrap interval for the mean.
Interval bootstrap_mean_interval(std::span<const double> values, Rng& rng, int resamples = 1000,
                                 double confidence = 0.95);

} // namespace voxfract
