#pragma once

#include "voxfract/cppn.hpp"
#include "voxfract/physics/evaluate.hpp"
#include "voxfract/polycube.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace voxfract
{

/// Reasons an individual scored zero without a full evaluation.
enum FitnessFlag : std::uint32_t
{
    kFlagNone = 0,
    kFlagEmpty = 1u << 0,        // presence output never positive
    kFlagDisconnected = 1u << 1, // a composed level fell apart
    kFlagDiverged = 1u << 2,     // simulation blew up at some level
    kFlagBudget = 1u << 3,       // a level exceeded the voxel budget
};

/// "empty|diverged", or "" when no flag is set.
std::string flags_to_string(std::uint32_t flags);
std::uint32_t flags_from_string(const std::string& s);

struct FitnessRecord
{
    std::vector<double> d; // body lengths, one per scale level
    double F = 0.0;        // min(d)
    double H = 0.0;        // Hausdorff dimension of the basal design (0 when empty)
    std::size_t c = 0;     // basal voxel count
    int age = 0;
    int generation = 0;
    std::uint32_t flags = kFlagNone;

    /// F scaled from the evaluation window to one minute.
    double per_minute(double duration) const { return F * 60.0 / duration; }

    friend bool operator==(const FitnessRecord&, const FitnessRecord&) = default;
};

enum class Condition : std::uint8_t
{
    Fractal,
    Control,
};

std::string_view to_string(Condition c);
std::optional<Condition> parse_condition(std::string_view s);

struct FitnessConfig
{
    int workspace = 3;
    std::vector<int> levels = {0, 1, 2};
    ActuationMode mode = ActuationMode::AntiPhase;
    double voxel_size = Polycube::kDefaultVoxelSize;
    EvalSettings eval;

    /// Throws std::invalid_argument when inconsistent.
    void validate(Condition condition) const;

    friend bool operator==(const FitnessConfig&, const FitnessConfig&) = default;
};

/// Everything fitness depends on besides the physics: the per-level bodies
/// (or the reason there are none) and a key identifying them.
struct Phenotype
{
    std::string key;
    std::uint32_t flags = kFlagNone;
    std::size_t c = 0;
    double H = 0.0;
    std::vector<Polycube> structures; // one per configured level, empty when flagged
};

/// Decodes, then fractalizes to each configured level.
Phenotype fractal_phenotype(const CppnGenome& g, const FitnessConfig& cfg);

/// Fractalizes an already decoded basal design to each configured level.
Phenotype design_phenotype(const Polycube& basal, const FitnessConfig& cfg);

/// Basal design from the first genome; the second and third select
/// placements of the previous level inside a workspace^3 arrangement.
Phenotype control_phenotype(const std::array<CppnGenome, 3>& g, const FitnessConfig& cfg);

/// Simulates every structure of `p`. Pure: equal phenotypes give equal records.
/// trajectories[k], when present and non-null, records the run of level k.
FitnessRecord evaluate_phenotype(const Phenotype& p, const FitnessConfig& cfg,
                                 std::span<TrajectoryWriter* const> trajectories = {});

FitnessRecord fitness(const CppnGenome& g, const FitnessConfig& cfg);
FitnessRecord fitness_control(const std::array<CppnGenome, 3>& g, const FitnessConfig& cfg);

} // namespace voxfract
