// voxfract: evolve, evaluate, fractalize, compare and replay voxel robots.

#include "voxfract/design_io.hpp"
#include "voxfract/errors.hpp"
#include "voxfract/harness/config.hpp"
#include "voxfract/harness/report.hpp"
#include "voxfract/harness/run.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

using namespace voxfract;

namespace
{

struct UsageError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::vector<int> parse_levels(const std::string& text)
{
    std::vector<int> levels;
    for (const auto& field : split_csv_line(text))
    {
        std::size_t used = 0;
        int level = -1;
        try
        {
            level = std::stoi(field, &used);
        }
        catch (const std::exception&)
        {
            used = 0;
        }
        if (used == 0 || used != field.size() || level < 0)
            throw UsageError(fmt::format("--levels: '{}' is not a non-negative integer", field));
        levels.push_back(level);
    }
    return levels;
}

ActuationMode parse_mode(const std::string& text)
{
    auto mode = parse_actuation_mode(text);
    if (!mode)
        throw UsageError(fmt::format("--mode: expected antiphase, wave or bladder, got '{}'", text));
    return *mode;
}

void print_record(const FitnessRecord& r, const std::vector<int>& levels, double duration)
{
    for (std::size_t k = 0; k < levels.size(); ++k)
        fmt::print("d[level {}] = {}\n", levels[k], r.d[k]);
    fmt::print("F = {}\nF_per_min = {}\nH = {}\nc = {}\n", r.F, r.per_minute(duration), r.H, r.c);
    if (r.flags != kFlagNone)
        fmt::print("flags = {}\n", flags_to_string(r.flags));
}

/// Evaluates `p`, writing trajectory_level_K.csv (and meshes) into `out` when set.
FitnessRecord evaluate_with_outputs(const Phenotype& p, const FitnessConfig& cfg, const std::optional<fs::path>& out,
                                    bool mesh, double interval)
{
    std::vector<std::unique_ptr<std::ofstream>> files;
    std::vector<std::unique_ptr<TrajectoryWriter>> writers;
    std::vector<TrajectoryWriter*> hooks;
    if (out)
    {
        fs::create_directories(*out);
        for (int level : cfg.levels)
        {
            auto csv = std::make_unique<std::ofstream>(*out / fmt::format("trajectory_level_{}.csv", level));
            std::unique_ptr<std::ofstream> m;
            if (mesh)
                m = std::make_unique<std::ofstream>(*out / fmt::format("mesh_level_{}.txt", level));
            writers.push_back(std::make_unique<TrajectoryWriter>(csv.get(), m.get(), interval));
            hooks.push_back(writers.back().get());
            files.push_back(std::move(csv));
            if (m)
                files.push_back(std::move(m));
        }
    }
    return evaluate_phenotype(p, cfg, hooks);
}

fs::path run_dir_of_champion(const fs::path& file)
{
    const fs::path parent = file.parent_path();
    return parent.filename() == "champions" ? parent.parent_path() : parent;
}

int cmd_evolve(const std::string& config_path, std::optional<std::uint64_t> seed, const std::string& levels,
               const std::string& mode, const std::string& condition, const fs::path& out)
{
    ExperimentConfig cfg = load_config(config_path);
    if (seed)
        cfg.evolution.seed = *seed;
    if (!levels.empty())
        cfg.evolution.fitness.levels = parse_levels(levels);
    if (!mode.empty())
        cfg.evolution.fitness.mode = parse_mode(mode);
    if (!condition.empty())
    {
        auto c = parse_condition(condition);
        if (!c)
            throw UsageError(fmt::format("--condition: expected fractal or control, got '{}'", condition));
        cfg.evolution.condition = *c;
    }
    try
    {
        cfg.evolution.validate();
    }
    catch (const std::invalid_argument& e)
    {
        throw UsageError(e.what());
    }
    const auto results = run_experiment(cfg, out, default_worker_count(), &std::cerr);
    for (const auto& r : results)
        fmt::print("{}: generation {} champion F {} (id {})\n", r.dir.string(), r.generation, r.champion.record.F,
                   r.champion.id);
    return 0;
}

struct EvaluateArgs
{
    fs::path file;
    std::string config;
    std::string levels;
    std::string mode;
    std::optional<double> amplitude;
    std::optional<fs::path> out;
    bool mesh = false;
    double interval = 0.05;
};

int cmd_evaluate(const EvaluateArgs& a)
{
    const std::string text = read_text(a.file);
    const auto j = nlohmann::ordered_json::parse(text, nullptr, false);
    const bool is_champion = !j.is_discarded() && j.is_object() && j.value("format", "") == "voxfract-champion";

    ExperimentConfig cfg;
    if (!a.config.empty())
        cfg = load_config(a.config);
    else if (is_champion && fs::exists(run_dir_of_champion(a.file) / "config.yaml"))
        cfg = load_config(run_dir_of_champion(a.file) / "config.yaml");
    FitnessConfig& fc = cfg.evolution.fitness;

    const bool overridden = !a.levels.empty() || !a.mode.empty() || a.amplitude.has_value();
    if (!a.levels.empty())
        fc.levels = parse_levels(a.levels);
    if (!a.mode.empty())
        fc.mode = parse_mode(a.mode);
    if (a.amplitude)
        fc.eval.material.volume_amplitude = *a.amplitude;

    Phenotype phenotype;
    std::optional<FitnessRecord> logged;
    Condition condition = Condition::Fractal;
    if (is_champion)
    {
        const ChampionSnapshot snap = load_champion(a.file);
        condition = snap.condition;
        phenotype = FitnessEngine(condition, fc, 1).phenotype(snap.individual.genotype);
        if (!overridden)
            logged = snap.individual.record;
    }
    else
    {
        const DesignSnapshot design = design_from_text(text);
        fc.workspace = design.design.extent();
        fc.voxel_size = design.design.voxel_size();
        if (a.mode.empty())
            fc.mode = design.mode;
        if (a.levels.empty() && a.config.empty())
            fc.levels = {0};
        phenotype = design_phenotype(design.design, fc);
    }
    try
    {
        fc.validate(condition);
    }
    catch (const std::invalid_argument& e)
    {
        throw UsageError(e.what());
    }

    FitnessRecord r = evaluate_with_outputs(phenotype, fc, a.out, a.mesh, a.interval);
    print_record(r, fc.levels, fc.eval.duration);
    if (logged)
    {
        r.age = logged->age;
        r.generation = logged->generation;
        if (r != *logged)
        {
            fmt::print("logged record differs: logged F = {}\n", logged->F);
            return 1;
        }
        fmt::print("matches logged record\n");
    }
    return 0;
}

int cmd_fractalize(const fs::path& design_path, int level, const fs::path& out, std::size_t budget)
{
    const DesignSnapshot design = load_design(design_path);
    const Polycube& basal = design.design;
    DesignSnapshot result{fractalize(basal, level, budget), design.mode};
    save_design(out, result);
    fmt::print("c = {}\nm = {}\nH = {:.6f}\nlevel = {}\nvoxels = {}\n", basal.size(), basal.extent(),
               hausdorff_dimension(basal.size(), basal.extent()), level, result.design.size());
    return 0;
}

int cmd_stats(const std::vector<std::string>& a, const std::vector<std::string>& b, const fs::path& out,
              std::uint64_t seed)
{
    auto to_paths = [](const std::vector<std::string>& v) { return std::vector<fs::path>(v.begin(), v.end()); };
    const ComparisonReport report = compare_groups(to_paths(a), to_paths(b), seed);
    double duration = EvalSettings{}.duration;
    if (fs::exists(report.a.runs.front() / "config.yaml"))
        duration = load_config(report.a.runs.front() / "config.yaml").evolution.fitness.eval.duration;
    write_report(report, out, duration);
    fmt::print("group a: {} runs, group b: {} runs\n", report.a.runs.size(), report.b.runs.size());
    fmt::print("W = {}\nU = {}\np = {} ({})\ndirection = {}\n", report.test.W, report.test.U, report.test.p,
               report.test.exact ? "exact" : "normal approximation", report.direction);
    return 0;
}

int cmd_replay(const fs::path& run_dir, std::optional<int> generation, const std::optional<fs::path>& out, bool mesh,
               double interval)
{
    const fs::path file = generation ? champion_path(run_dir, *generation) : run_dir / "champion.json";
    const ExperimentConfig cfg = load_config(run_dir / "config.yaml");
    const ChampionSnapshot snap = load_champion(file);
    const FitnessConfig& fc = cfg.evolution.fitness;
    const Phenotype p = FitnessEngine(snap.condition, fc, 1).phenotype(snap.individual.genotype);
    FitnessRecord r = evaluate_with_outputs(p, fc, out, mesh, interval);
    fmt::print("generation {} champion id {}\n", snap.generation, snap.individual.id);
    print_record(r, fc.levels, fc.eval.duration);
    r.age = snap.individual.record.age;
    r.generation = snap.individual.record.generation;
    if (r != snap.individual.record)
    {
        fmt::print("replay differs from the logged record (logged F = {})\n", snap.individual.record.F);
        return 1;
    }
    fmt::print("matches logged record\n");
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Voxel soft-robot simulator and fractal morphology evolution"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(code_version()));

    std::string config, levels, mode, condition;
    std::optional<std::uint64_t> seed;
    fs::path out;

    auto* evolve = app.add_subcommand("evolve", "Run an evolutionary experiment");
    evolve->add_option("--config", config, "YAML experiment config")->required()->check(CLI::ExistingFile);
    evolve->add_option("--seed", seed, "Override the seed");
    evolve->add_option("--levels", levels, "Override scale levels, e.g. 0,1");
    evolve->add_option("--mode", mode, "antiphase, wave or bladder");
    evolve->add_option("--condition", condition, "fractal or control");
    evolve->add_option("--out", out, "Run directory")->required();

    EvaluateArgs eval;
    std::string eval_out;
    auto* evaluate = app.add_subcommand("evaluate", "Simulate a design or a saved champion");
    evaluate->add_option("file", eval.file, "Design JSON or champion JSON")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--config", eval.config, "YAML config for material, solver and levels");
    evaluate->add_option("--levels", eval.levels, "Scale levels, e.g. 0,1");
    evaluate->add_option("--mode", eval.mode, "antiphase, wave or bladder");
    evaluate->add_option("--amplitude", eval.amplitude, "Volume amplitude override");
    evaluate->add_option("--out", eval_out, "Directory for trajectory files");
    evaluate->add_flag("--mesh", eval.mesh, "Also write per-frame surface meshes");
    evaluate->add_option("--frame-interval", eval.interval, "Seconds between recorded frames")
        ->check(CLI::PositiveNumber);

    fs::path design_path, fractal_out;
    int level = 1;
    std::size_t budget = kDefaultVoxelBudget;
    auto* fractal = app.add_subcommand("fractalize", "Build the level-k fractal of a design");
    fractal->add_option("design", design_path, "Design JSON")->required()->check(CLI::ExistingFile);
    fractal->add_option("--levels", level, "Fractal level k")->required()->check(CLI::NonNegativeNumber);
    fractal->add_option("--budget", budget, "Voxel budget");
    fractal->add_option("--out", fractal_out, "Output design JSON")->required();

    std::vector<std::string> group_a, group_b;
    std::uint64_t stats_seed = 1;
    fs::path stats_out;
    auto* stats = app.add_subcommand("stats", "Compare final champions of two groups of runs");
    stats->add_option("--group-a", group_a, "Run or batch directories")->required();
    stats->add_option("--group-b", group_b, "Run or batch directories")->required();
    stats->add_option("--seed", stats_seed, "Bootstrap seed");
    stats->add_option("--out", stats_out, "Report directory")->required();

    fs::path run_dir;
    std::optional<int> replay_generation;
    std::string replay_out;
    bool replay_mesh = false;
    double replay_interval = 0.05;
    auto* replay = app.add_subcommand("replay", "Re-simulate a logged champion and check it");
    replay->add_option("run_dir", run_dir, "Trial directory")->required()->check(CLI::ExistingDirectory);
    replay->add_option("--generation", replay_generation, "Champion of this generation (default: final)");
    replay->add_option("--out", replay_out, "Directory for trajectory files");
    replay->add_flag("--mesh", replay_mesh, "Also write per-frame surface meshes");
    replay->add_option("--frame-interval", replay_interval, "Seconds between recorded frames")
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*evolve)
            return cmd_evolve(config, seed, levels, mode, condition, out);
        if (*evaluate)
        {
            if (!eval_out.empty())
                eval.out = eval_out;
            return cmd_evaluate(eval);
        }
        if (*fractal)
            return cmd_fractalize(design_path, level, fractal_out, budget);
        if (*stats)
            return cmd_stats(group_a, group_b, stats_out, stats_seed);
        if (*replay)
            return cmd_replay(run_dir, replay_generation,
                              replay_out.empty() ? std::nullopt : std::optional<fs::path>(replay_out), replay_mesh,
                              replay_interval);
    }
    catch (const ConfigError& e)
    {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    }
    catch (const UsageError& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
