#pragma once

#include "voxfract/evolution/evolution.hpp"
#include "voxfract/evolution/stats.hpp"
#include "voxfract/harness/config.hpp"

#include <filesystem>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace voxfract
{

namespace fs = std::filesystem;

/// A run directory that cannot be created, resumed or read.
struct RunError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::string_view code_version();

struct TrialResult
{
    fs::path dir;
    int generation = 0; // last completed generation
    Individual champion;
    bool resumed = false;
};

/// Runs one trial into `dir`, resuming from its checkpoint when one exists
/// for the same configuration.
///
/// Layout: config.yaml, manifest.json, fitness.csv, champion_curve.csv,
/// hausdorff.csv, champions/gen_NNNN.json, champion.json, checkpoint.json.
TrialResult run_trial(const ExperimentConfig& cfg, const fs::path& dir, int workers, std::ostream* progress = nullptr);

/// One trial in `out` when cfg.trials == 1. Otherwise trial k goes to
/// out/trial_KKK with seed + k, and out/curve.csv holds the mean champion F
/// per generation with bootstrap intervals.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, const fs::path& out, int workers,
                                        std::ostream* progress = nullptr);

/// `dir` itself when it holds a trial, else its trial_* subdirectories in name order.
std::vector<fs::path> find_runs(const fs::path& dir);

struct ChampionCurve
{
    std::vector<int> generation;
    std::vector<double> F;
    std::vector<double> H;
};

ChampionCurve read_champion_curve(const fs::path& run_dir);

struct CurvePoint
{
    int generation = 0;
    std::size_t trials = 0;
    Interval F;
};

/// Mean champion F across runs per generation, with 95% bootstrap intervals
/// (1000 resamples drawn from Rng(seed)).
std::vector<CurvePoint> mean_curve(const std::vector<ChampionCurve>& runs, std::uint64_t seed);

/// generation,trials,mean_F,ci_low,ci_high,half_width,mean_F_per_min
void write_curve_csv(const fs::path& file, const std::vector<CurvePoint>& curve, double duration);

struct ChampionSnapshot
{
    int generation = 0;
    Condition condition = Condition::Fractal;
    Individual individual;
};

ChampionSnapshot load_champion(const fs::path& file);

/// Champion snapshot path for a generation, e.g. champions/gen_0007.json.
fs::path champion_path(const fs::path& run_dir, int generation);

std::string read_text(const fs::path& file);
/// Writes through a temporary file and rename.
void write_text_atomic(const fs::path& file, const std::string& text);

/// One CSV line (fields may not contain commas or quotes).
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace voxfract
