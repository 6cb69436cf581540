#include "voxfract/evolution/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace voxfract
{

namespace
{

struct Ranked
{
    std::vector<long> twice_rank; // midranks doubled, so always integral
    double tie_term = 0.0;        // sum of t^3 - t over tie groups
};

Ranked midranks(std::span<const double> pooled)
{
    const std::size_t n = pooled.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });

    Ranked r;
    r.twice_rank.resize(n);
    for (std::size_t i = 0; i < n;)
    {
        std::size_t j = i;
        while (j + 1 < n && pooled[order[j + 1]] == pooled[order[i]])
            ++j;
        // Ranks i+1 .. j+1 share their mean (i + j + 2) / 2.
        for (std::size_t k = i; k <= j; ++k)
            r.twice_rank[order[k]] = static_cast<long>(i + j + 2);
        const auto t = static_cast<double>(j - i + 1);
        r.tie_term += t * t * t - t;
        i = j + 1;
    }
    return r;
}

double exact_p(const std::vector<long>& twice_rank, std::size_t n_a, long observed)
{
    const std::size_t n = twice_rank.size();
    const long center = static_cast<long>(n_a * (n + 1)); // twice the expected rank sum
    const long deviation = std::abs(observed - center);
    std::uint64_t extreme = 0, total = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
    {
        if (static_cast<std::size_t>(std::popcount(mask)) != n_a)
            continue;
        long sum = 0;
        for (std::size_t k = 0; k < n; ++k)
            if (mask & (1u << k))
                sum += twice_rank[k];
        ++total;
        if (std::abs(sum - center) >= deviation)
            ++extreme;
    }
    return static_cast<double>(extreme) / static_cast<double>(total);
}

} // namespace

RankSumResult wilcoxon_rank_sum(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 3 || b.size() < 3)
        throw std::invalid_argument("rank-sum test needs at least three values per sample");
    std::vector<double> pooled(a.begin(), a.end());
    pooled.insert(pooled.end(), b.begin(), b.end());
    if (!std::all_of(pooled.begin(), pooled.end(), [](double v) { return std::isfinite(v); }))
        throw std::invalid_argument("rank-sum samples must be finite");

    const Ranked ranked = midranks(pooled);
    RankSumResult r;
    r.n_a = a.size();
    r.n_b = b.size();
    const long twice_w = std::accumulate(ranked.twice_rank.begin(), ranked.twice_rank.begin() + static_cast<long>(r.n_a), 0L);
    r.W = 0.5 * static_cast<double>(twice_w);
    r.U = r.W - 0.5 * static_cast<double>(r.n_a * (r.n_a + 1));

    const auto n = static_cast<double>(pooled.size());
    if (pooled.size() <= kExactRankSumLimit)
    {
        r.exact = true;
        r.p = exact_p(ranked.twice_rank, r.n_a, twice_w);
        return r;
    }
    const auto na = static_cast<double>(r.n_a), nb = static_cast<double>(r.n_b);
    const double mean = 0.5 * na * (n + 1.0);
    const double variance = na * nb / 12.0 * ((n + 1.0) - ranked.tie_term / (n * (n - 1.0)));
    if (!(variance > 0.0))
    {
        r.p = 1.0;
        return r;
    }
    const double z = std::max(0.0, std::abs(r.W - mean) - 0.5) / std::sqrt(variance);
    r.p = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
    return r;
}

Interval bootstrap_mean_interval(std::span<const double> values, Rng& rng, int resamples, double confidence)
{
    if (values.empty())
        throw std::invalid_argument("bootstrap needs at least one value");
    if (resamples < 1 || !(confidence > 0.0 && confidence < 1.0))
        throw std::invalid_argument("bootstrap needs resamples >= 1 and confidence in (0, 1)");
    const std::size_t n = values.size();
    Interval out;
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

    std::vector<double> means(static_cast<std::size_t>(resamples));
    for (auto& m : means)
    {
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            sum += values[rng.index(n)];
        m = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const double tail = 0.5 * (1.0 - confidence);
    const auto count = static_cast<double>(resamples);
    const auto lo = static_cast<std::size_t>(std::floor(tail * count));
    const auto hi = static_cast<std::size_t>(std::max(1.0, std::ceil((1.0 - tail) * count))) - 1;
    out.low = means[std::min(lo, means.size() - 1)];
    out.high = means[std::min(hi, means.size() - 1)];
    return out;
}

} // namespace voxfract
