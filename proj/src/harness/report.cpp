#include "voxfract/harness/report.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace voxfract
{

namespace
{

GroupSummary summarize(const std::vector<fs::path>& paths, std::uint64_t seed, const char* name)
{
    GroupSummary g;
    for (const auto& p : paths)
    {
        auto runs = find_runs(p);
        if (runs.empty())
            throw RunError(fmt::format("{}: no runs found", p.string()));
        g.runs.insert(g.runs.end(), runs.begin(), runs.end());
    }
    if (g.runs.size() < 3)
        throw RunError(fmt::format("group {} has {} run(s), at least 3 are needed", name, g.runs.size()));
    std::vector<ChampionCurve> curves;
    for (const auto& run : g.runs)
    {
        curves.push_back(read_champion_curve(run));
        if (curves.back().F.empty())
            throw RunError(fmt::format("{}: empty champion curve", run.string()));
        g.final_F.push_back(curves.back().F.back());
    }
    g.curve = mean_curve(curves, seed);
    return g;
}

} // namespace

ComparisonReport compare_groups(const std::vector<fs::path>& group_a, const std::vector<fs::path>& group_b,
                                std::uint64_t seed)
{
    ComparisonReport r;
    r.a = summarize(group_a, seed, "a");
    r.b = summarize(group_b, seed, "b");
    r.test = wilcoxon_rank_sum(r.a.final_F, r.b.final_F);
    const double center = 0.5 * static_cast<double>(r.test.n_a * r.test.n_b);
    r.direction = r.test.U > center ? "a>b" : r.test.U < center ? "a<b" : "none";
    return r;
}

void write_report(const ComparisonReport& report, const fs::path& out, double duration)
{
    fs::create_directories(out);
    auto group_json = [](const GroupSummary& g) {
        nlohmann::ordered_json j;
        j["runs"] = nlohmann::ordered_json::array();
        for (const auto& r : g.runs)
            j["runs"].push_back(r.string());
        j["final_F"] = g.final_F;
        return j;
    };
    nlohmann::ordered_json j;
    j["format"] = "voxfract-stats";
    j["version"] = 1;
    j["code_version"] = code_version();
    j["statistic"] = "final champion F";
    j["group_a"] = group_json(report.a);
    j["group_b"] = group_json(report.b);
    j["wilcoxon"] = {{"n_a", report.test.n_a}, {"n_b", report.test.n_b}, {"W", report.test.W},
                     {"U", report.test.U},     {"p", report.test.p},     {"exact", report.test.exact}};
    j["direction"] = report.direction;
    j["artifacts"] = {{"curve_a", "curve_a.csv"}, {"curve_b", "curve_b.csv"}, {"hausdorff", "hausdorff.csv"}};
    write_text_atomic(out / "report.json", j.dump(1) + "\n");

    write_curve_csv(out / "curve_a.csv", report.a.curve, duration);
    write_curve_csv(out / "curve_b.csv", report.b.curve, duration);

    std::string h = "group,run,generation,H\n";
    for (const auto& [name, g] : {std::pair{"a", &report.a}, std::pair{"b", &report.b}})
        for (const auto& run : g->runs)
        {
            const auto curve = read_champion_curve(run);
            for (std::size_t k = 0; k < curve.generation.size(); ++k)
                h += fmt::format("{},{},{},{}\n", name, run.string(), curve.generation[k], curve.H[k]);
        }
    write_text_atomic(out / "hausdorff.csv", h);
}

} // namespace voxfract
