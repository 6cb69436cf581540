#pragma once

#include "voxfract/evolution/stats.hpp"
#include "voxfract/harness/run.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace voxfract
{

struct GroupSummary
{
    std::vector<fs::path> runs;
    std::vector<double> final_F; // last logged champion F of each run
    std::vector<CurvePoint> curve;
};

struct ComparisonReport
{
    GroupSummary a;
    GroupSummary b;
    RankSumResult test;
    std::string direction; // "a>b", "a<b" or "none"
};

/// Expands each path with find_runs and compares the final champion F of
/// the two groups. Throws RunError when a group has fewer than three runs.
ComparisonReport compare_groups(const std::vector<fs::path>& group_a, const std::vector<fs::path>& group_b,
                                std::uint64_t seed);

/// report.json, curve_a.csv, curve_b.csv and hausdorff.csv (group,run,generation,H) in `out`.
void write_report(const ComparisonReport& report, const fs::path& out, double duration);

} // namespace voxfract
