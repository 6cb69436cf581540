#include "voxfract/harness/run.hpp"

#include "voxfract/version.hpp"

#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>

namespace voxfract
{

using json = nlohmann::ordered_json;

namespace
{

constexpr const char* kFitnessLog = "fitness.csv";
constexpr const char* kChampionCurve = "champion_curve.csv";
constexpr const char* kHausdorffLog = "hausdorff.csv";
constexpr const char* kCheckpoint = "checkpoint.json";
constexpr const char* kManifest = "manifest.json";
constexpr const char* kConfigCopy = "config.yaml";

std::string utc_now()
{
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", now);
}

json parse_json_file(const fs::path& file)
{
    try
    {
        return json::parse(read_text(file));
    }
    catch (const json::exception& e)
    {
        throw RunError(fmt::format("{}: {}", file.string(), e.what()));
    }
}

std::uintmax_t size_or_zero(const fs::path& file)
{
    std::error_code ec;
    const auto n = fs::file_size(file, ec);
    return ec ? 0 : n;
}

void append(const fs::path& file, const std::string& text)
{
    std::ofstream out(file, std::ios::binary | std::ios::app);
    out << text;
    if (!out.flush())
        throw RunError(fmt::format("{}: write failed", file.string()));
}

std::string fitness_header(const FitnessConfig& cfg)
{
    std::string h = "generation,id,parent_id,age,c,H";
    for (int level : cfg.levels)
        h += fmt::format(",d_{}", level);
    return h + ",F,F_per_min,flags,survived\n";
}

class TrialWriter
{
  public:
    TrialWriter(fs::path dir, const ExperimentConfig& cfg, std::string yaml)
        : dir_(std::move(dir)), cfg_(cfg), yaml_(std::move(yaml))
    {
    }

    void start_fresh()
    {
        fs::create_directories(dir_ / "champions");
        write_text_atomic(dir_ / kConfigCopy, yaml_);
        write_text_atomic(dir_ / kFitnessLog, fitness_header(cfg_.evolution.fitness));
        write_text_atomic(dir_ / kChampionCurve, "generation,champion_id,F,F_per_min,H,c,fingerprint\n");
        write_text_atomic(dir_ / kHausdorffLog, "generation,H\n");
        started_at_ = utc_now();
        write_manifest("running");
    }

    /// Truncates the logs to the sizes recorded with the checkpoint.
    void resume_from(const json& checkpoint)
    {
        for (const char* name : {kFitnessLog, kChampionCurve, kHausdorffLog})
        {
            const auto size = checkpoint.at("logs").at(name).get<std::uintmax_t>();
            if (size_or_zero(dir_ / name) < size)
                throw RunError(fmt::format("{}: shorter than its checkpoint records", (dir_ / name).string()));
            fs::resize_file(dir_ / name, size);
        }
        fs::create_directories(dir_ / "champions");
        if (fs::exists(dir_ / kManifest))
            started_at_ = parse_json_file(dir_ / kManifest).value("started_at", utc_now());
        else
            started_at_ = utc_now();
        write_manifest("running");
    }

    void record(const Evolution& evo)
    {
        const int gen = evo.generation();
        const double duration = cfg_.evolution.fitness.eval.duration;
        std::string rows;
        for (const auto& entry : evo.pool())
        {
            const Individual& ind = entry.individual;
            const FitnessRecord& r = ind.record;
            rows += fmt::format("{},{},{},{},{},{}", gen, ind.id, ind.parent, ind.age, r.c, r.H);
            for (double d : r.d)
                rows += fmt::format(",{}", d);
            rows += fmt::format(",{},{},{},{}\n", r.F, r.per_minute(duration), flags_to_string(r.flags),
                                entry.survived ? 1 : 0);
        }
        append(dir_ / kFitnessLog, rows);

        const Individual& champ = evo.champion();
        append(dir_ / kChampionCurve,
               fmt::format("{},{},{},{},{},{},{:016x}\n", gen, champ.id, champ.record.F,
                           champ.record.per_minute(duration), champ.record.H, champ.record.c,
                           genotype_fingerprint(champ.genotype)));
        append(dir_ / kHausdorffLog, fmt::format("{},{}\n", gen, champ.record.H));

        json snapshot;
        snapshot["format"] = "voxfract-champion";
        snapshot["version"] = 1;
        snapshot["generation"] = gen;
        snapshot["condition"] = to_string(cfg_.evolution.condition);
        snapshot["workspace"] = cfg_.evolution.fitness.workspace;
        snapshot["scale_levels"] = cfg_.evolution.fitness.levels;
        snapshot["individual"] = individual_to_json(champ);
        const std::string text = snapshot.dump(1) + "\n";
        write_text_atomic(champion_path(dir_, gen), text);
        write_text_atomic(dir_ / "champion.json", text);

        write_checkpoint(evo, evo.finished());
        if (evo.finished())
            write_manifest("complete");
    }

  private:
    void write_checkpoint(const Evolution& evo, bool complete)
    {
        json j;
        j["format"] = "voxfract-checkpoint";
        j["version"] = 1;
        j["config"] = yaml_;
        j["complete"] = complete;
        json logs;
        for (const char* name : {kFitnessLog, kChampionCurve, kHausdorffLog})
            logs[name] = size_or_zero(dir_ / name);
        j["logs"] = std::move(logs);
        j["state"] = evo.save_state();
        write_text_atomic(dir_ / kCheckpoint, j.dump(1) + "\n");
    }

    void write_manifest(const std::string& status)
    {
        json m;
        m["format"] = "voxfract-manifest";
        m["version"] = 1;
        m["code_version"] = code_version();
        m["seed"] = cfg_.evolution.seed;
        m["condition"] = to_string(cfg_.evolution.condition);
        m["status"] = status;
        m["started_at"] = started_at_;
        m["updated_at"] = utc_now();
        if (status == "complete")
            m["finished_at"] = m["updated_at"];
        m["config"] = yaml_;
        m["artifacts"] = {{"config", kConfigCopy},       {"fitness_log", kFitnessLog},
                          {"champion_curve", kChampionCurve}, {"hausdorff", kHausdorffLog},
                          {"champions", "champions/"},    {"final_champion", "champion.json"},
                          {"checkpoint", kCheckpoint}};
        write_text_atomic(dir_ / kManifest, m.dump(1) + "\n");
    }

    fs::path dir_;
    const ExperimentConfig& cfg_;
    std::string yaml_;
    std::string started_at_;
};

} // namespace

std::string_view code_version()
{
    return kVoxfractVersion;
}

std::string read_text(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw RunError(fmt::format("{}: cannot open file", file.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void write_text_atomic(const fs::path& file, const std::string& text)
{
    const fs::path tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out.flush())
            throw RunError(fmt::format("{}: write failed", tmp.string()));
    }
    fs::rename(tmp, file);
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true)
    {
        const std::size_t comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos)
            break;
        start = comma + 1;
    }
    return fields;
}

fs::path champion_path(const fs::path& run_dir, int generation)
{
    return run_dir / "champions" / fmt::format("gen_{:04d}.json", generation);
}

TrialResult run_trial(const ExperimentConfig& cfg, const fs::path& dir, int workers, std::ostream* progress)
{
    const std::string yaml = config_to_yaml(cfg);
    Evolution evo(cfg.evolution, workers);
    TrialWriter writer(dir, cfg, yaml);
    TrialResult result;
    result.dir = dir;

    const fs::path checkpoint = dir / kCheckpoint;
    if (fs::exists(checkpoint))
    {
        const json j = parse_json_file(checkpoint);
        if (j.at("config").get<std::string>() != yaml)
            throw RunError(fmt::format("{}: holds a run with a different configuration", dir.string()));
        evo.restore_state(j.at("state"));
        result.resumed = true;
        if (j.at("complete").get<bool>())
        {
            result.generation = evo.generation();
            result.champion = evo.champion();
            return result;
        }
        writer.resume_from(j);
        if (progress)
            fmt::print(*progress, "{}: resuming after generation {}\n", dir.string(), evo.generation());
    }
    else
    {
        writer.start_fresh();
        evo.initialize();
        writer.record(evo);
    }

    auto report = [&] {
        if (progress)
            fmt::print(*progress, "{}: generation {}/{} champion F {:.6g} (simulated {}, cached {})\n", dir.string(),
                       evo.generation(), cfg.evolution.generations, evo.champion().record.F,
                       evo.engine().simulations(), evo.engine().cache_hits());
    };
    if (!result.resumed)
        report();
    while (!evo.finished())
    {
        evo.advance();
        writer.record(evo);
        report();
    }
    result.generation = evo.generation();
    result.champion = evo.champion();
    return result;
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, const fs::path& out, int workers,
                                        std::ostream* progress)
{
    if (cfg.trials == 1)
        return {run_trial(cfg, out, workers, progress)};

    fs::create_directories(out);
    write_text_atomic(out / kConfigCopy, config_to_yaml(cfg));
    std::vector<TrialResult> results;
    std::vector<ChampionCurve> curves;
    json trials = json::array();
    for (int k = 0; k < cfg.trials; ++k)
    {
        ExperimentConfig trial = cfg;
        trial.trials = 1;
        trial.evolution.seed = cfg.evolution.seed + static_cast<std::uint64_t>(k);
        const fs::path dir = out / fmt::format("trial_{:03d}", k);
        results.push_back(run_trial(trial, dir, workers, progress));
        curves.push_back(read_champion_curve(dir));
        trials.push_back({{"dir", dir.filename().string()}, {"seed", trial.evolution.seed}});
    }
    write_curve_csv(out / "curve.csv", mean_curve(curves, cfg.evolution.seed), cfg.evolution.fitness.eval.duration);

    json m;
    m["format"] = "voxfract-batch";
    m["version"] = 1;
    m["code_version"] = code_version();
    m["trials"] = std::move(trials);
    m["config"] = config_to_yaml(cfg);
    m["artifacts"] = {{"config", kConfigCopy}, {"curve", "curve.csv"}};
    write_text_atomic(out / kManifest, m.dump(1) + "\n");
    return results;
}

std::vector<fs::path> find_runs(const fs::path& dir)
{
    if (fs::exists(dir / kChampionCurve))
        return {dir};
    std::vector<fs::path> runs;
    if (fs::is_directory(dir))
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_directory() && entry.path().filename().string().starts_with("trial_") &&
                fs::exists(entry.path() / kChampionCurve))
                runs.push_back(entry.path());
    std::sort(runs.begin(), runs.end());
    return runs;
}

ChampionCurve read_champion_curve(const fs::path& run_dir)
{
    std::istringstream in(read_text(run_dir / kChampionCurve));
    std::string line;
    std::getline(in, line); // header
    ChampionCurve curve;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() < 5)
            throw RunError(fmt::format("{}: malformed row '{}'", (run_dir / kChampionCurve).string(), line));
        curve.generation.push_back(std::stoi(f[0]));
        curve.F.push_back(std::stod(f[2]));
        curve.H.push_back(std::stod(f[4]));
    }
    return curve;
}

std::vector<CurvePoint> mean_curve(const std::vector<ChampionCurve>& runs, std::uint64_t seed)
{
    std::map<int, std::vector<double>> by_generation;
    for (const auto& run : runs)
        for (std::size_t k = 0; k < run.generation.size(); ++k)
            by_generation[run.generation[k]].push_back(run.F[k]);
    Rng rng(seed);
    std::vector<CurvePoint> curve;
    for (const auto& [gen, values] : by_generation)
        curve.push_back({gen, values.size(), bootstrap_mean_interval(values, rng)});
    return curve;
}

void write_curve_csv(const fs::path& file, const std::vector<CurvePoint>& curve, double duration)
{
    std::string text = "generation,trials,mean_F,ci_low,ci_high,half_width,mean_F_per_min\n";
    for (const auto& p : curve)
        text += fmt::format("{},{},{},{},{},{},{}\n", p.generation, p.trials, p.F.mean, p.F.low, p.F.high,
                            p.F.half_width(), p.F.mean * 60.0 / duration);
    write_text_atomic(file, text);
}

ChampionSnapshot load_champion(const fs::path& file)
{
    const json j = parse_json_file(file);
    if (j.value("format", "") != "voxfract-champion")
        throw RunError(fmt::format("{}: not a champion snapshot", file.string()));
    ChampionSnapshot s;
    s.generation = j.at("generation").get<int>();
    auto condition = parse_condition(j.at("condition").get<std::string>());
    if (!condition)
        throw RunError(fmt::format("{}: unknown condition", file.string()));
    s.condition = *condition;
    s.individual = individual_from_json(j.at("individual"));
    return s;
}

} // namespace voxfract
