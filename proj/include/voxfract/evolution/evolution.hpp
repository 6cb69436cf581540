#pragma once

#include "voxfract/cppn.hpp"
#include "voxfract/evolution/fitness.hpp"
#include "voxfract/rng.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

namespace voxfract
{

/// How a control-condition genome triple is varied.
enum class ControlMutation : std::uint8_t
{
    One, // one uniformly chosen sub-genome per variation event
    All,
};

std::string_view to_string(ControlMutation m);
std::optional<ControlMutation> parse_control_mutation(std::string_view s);

struct EvolutionConfig
{
    std::uint64_t seed = 1;
    int population_size = 16;
    int generations = 325;
    Condition condition = Condition::Fractal;
    ControlMutation control_mutation = ControlMutation::One;
    CppnParams cppn;
    FitnessConfig fitness;

    void validate() const;

    friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

/// One CPPN for the fractal condition, three for the control.
struct Genotype
{
    std::vector<CppnGenome> cppns;

    friend bool operator==(const Genotype&, const Genotype&) = default;
};

struct Individual
{
    std::uint64_t id = 0;
    std::int64_t parent = -1; // -1 for randomly generated genomes
    int age = 0;
    Genotype genotype;
    FitnessRecord record; // record.age / record.generation are taken at evaluation

    friend bool operator==(const Individual&, const Individual&) = default;
};

/// True when `a` is at least as good as `b` on both objectives (higher F,
/// lower age) and strictly better on one.
bool dominates(const Individual& a, const Individual& b);

/// Evaluates genotypes in parallel, memoized by phenotype. Lookups and
/// result placement happen in submission order, so outcomes do not depend
/// on the worker count or on scheduling.
class FitnessEngine
{
  public:
    FitnessEngine(Condition condition, FitnessConfig cfg, int workers);

    /// Fills record for each individual (age and generation included).
    void evaluate(std::vector<Individual*> batch, int generation);

    Phenotype phenotype(const Genotype& g) const;
    FitnessRecord evaluate_one(const Genotype& g) const;

    std::size_t simulations() const { return simulations_; }
    std::size_t cache_hits() const { return cache_hits_; }
    int workers() const { return workers_; }

  private:
    Condition condition_;
    FitnessConfig cfg_;
    int workers_;
    std::unordered_map<std::string, FitnessRecord> cache_;
    std::size_t simulations_ = 0;
    std::size_t cache_hits_ = 0;
};

struct PoolEntry
{
    Individual individual;
    bool survived = false;
};

/// Age-fitness Pareto search.
///
/// Generation 0 is the random initial population. Each later generation
/// ages everyone by one, fills the population to twice its size with
/// mutated copies of uniformly chosen survivors, injects one random genome
/// of age 0, evaluates the newcomers and discards dominated individuals
/// until population_size remain.
class Evolution
{
  public:
    Evolution(EvolutionConfig cfg, int workers);

    /// Creates and evaluates generation 0.
    void initialize();
    /// Runs one more generation.
    void advance();

    bool initialized() const { return generation_ >= 0; }
    bool finished() const { return generation_ >= cfg_.generations; }
    int generation() const { return generation_; }

    const EvolutionConfig& config() const { return cfg_; }
    const std::vector<Individual>& population() const { return population_; }
    /// Everyone considered in the latest generation, in creation order.
    const std::vector<PoolEntry>& pool() const { return pool_; }
    /// Highest F seen so far; the earliest such individual wins ties.
    const Individual& champion() const { return champion_; }
    const FitnessEngine& engine() const { return engine_; }

    nlohmann::ordered_json save_state() const;
    void restore_state(const nlohmann::ordered_json& j);

  private:
    Genotype random_genotype();
    Genotype mutate_genotype(const Genotype& parent);
    void reduce();
    void update_champion();

    EvolutionConfig cfg_;
    Rng rng_;
    FitnessEngine engine_;
    int generation_ = -1;
    std::uint64_t next_id_ = 0;
    std::vector<Individual> population_;
    std::vector<PoolEntry> pool_;
    Individual champion_;
    bool has_champion_ = false;
};

struct GenerationSummary
{
    int generation = 0;
    Individual champion;
};

/// Runs a whole search in memory; `on_generation` (optional) sees the
/// engine after every generation including 0.
std::vector<GenerationSummary> evolve(const EvolutionConfig& cfg, int workers,
                                      const std::function<void(const Evolution&)>& on_generation = {});

nlohmann::ordered_json individual_to_json(const Individual& ind);
Individual individual_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json record_to_json(const FitnessRecord& r);
FitnessRecord record_from_json(const nlohmann::ordered_json& j);

/// Hash of the genotype's canonical text.
std::uint64_t genotype_fingerprint(const Genotype& g);

/// Worker count from VOXFRACT_WORKERS, else the hardware concurrency.
int default_worker_count();

} // namespace voxfract
