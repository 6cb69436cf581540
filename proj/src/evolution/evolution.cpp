#include "voxfract/evolution/evolution.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace voxfract
{

using json = nlohmann::ordered_json;

std::string_view to_string(ControlMutation m)
{
    return m == ControlMutation::One ? "one" : "all";
}

std::optional<ControlMutation> parse_control_mutation(std::string_view s)
{
    if (s == "one")
        return ControlMutation::One;
    if (s == "all")
        return ControlMutation::All;
    return std::nullopt;
}

void EvolutionConfig::validate() const
{
    if (population_size < 2)
        throw std::invalid_argument("population_size must be >= 2");
    if (generations < 0)
        throw std::invalid_argument("generations must be >= 0");
    if (cppn.min_hidden < 0 || cppn.max_hidden < cppn.min_hidden)
        throw std::invalid_argument("cppn hidden node range is empty");
    if (!(cppn.perturb_sigma > 0.0))
        throw std::invalid_argument("perturb_sigma must be positive");
    if (cppn.max_mutation_attempts < 1)
        throw std::invalid_argument("max_mutation_attempts must be >= 1");
    fitness.validate(condition);
}

bool dominates(const Individual& a, const Individual& b)
{
    const double fa = a.record.F, fb = b.record.F;
    return fa >= fb && a.age <= b.age && (fa > fb || a.age < b.age);
}

FitnessEngine::FitnessEngine(Condition condition, FitnessConfig cfg, int workers)
    : condition_(condition), cfg_(std::move(cfg)), workers_(std::max(1, workers))
{
}

Phenotype FitnessEngine::phenotype(const Genotype& g) const
{
    if (condition_ == Condition::Fractal)
        return fractal_phenotype(g.cppns.at(0), cfg_);
    if (g.cppns.size() != 3)
        throw std::invalid_argument("control genotypes hold three CPPNs");
    return control_phenotype({g.cppns[0], g.cppns[1], g.cppns[2]}, cfg_);
}

FitnessRecord FitnessEngine::evaluate_one(const Genotype& g) const
{
    return evaluate_phenotype(phenotype(g), cfg_);
}

void FitnessEngine::evaluate(std::vector<Individual*> batch, int generation)
{
    struct Job
    {
        Phenotype phenotype;
        FitnessRecord result;
        std::exception_ptr error;
    };
    std::vector<Job> jobs;
    std::unordered_map<std::string, std::size_t> queued;
    std::vector<std::size_t> job_of(batch.size(), SIZE_MAX);
    std::vector<const FitnessRecord*> cached(batch.size(), nullptr);

    for (std::size_t i = 0; i < batch.size(); ++i)
    {
        Phenotype p = phenotype(batch[i]->genotype);
        if (auto it = cache_.find(p.key); it != cache_.end())
        {
            cached[i] = &it->second;
            ++cache_hits_;
        }
        else if (auto q = queued.find(p.key); q != queued.end())
        {
            job_of[i] = q->second;
            ++cache_hits_;
        }
        else
        {
            queued.emplace(p.key, jobs.size());
            job_of[i] = jobs.size();
            jobs.push_back({std::move(p), {}, nullptr});
        }
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++)
        {
            try
            {
                jobs[k].result = evaluate_phenotype(jobs[k].phenotype, cfg_);
            }
            catch (...)
            {
                jobs[k].error = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(workers_), jobs.size());
    if (threads <= 1)
        work();
    else
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t)
            pool.emplace_back(work);
    }

    for (auto& job : jobs)
    {
        if (job.error)
            std::rethrow_exception(job.error);
        ++simulations_;
    }
    for (std::size_t i = 0; i < batch.size(); ++i)
    {
        FitnessRecord r = cached[i] ? *cached[i] : jobs[job_of[i]].result;
        r.age = batch[i]->age;
        r.generation = generation;
        batch[i]->record = std::move(r);
    }
    for (auto& job : jobs)
        cache_.emplace(std::move(job.phenotype.key), job.result);
}

Evolution::Evolution(EvolutionConfig cfg, int workers)
    : cfg_(std::move(cfg)), rng_(cfg_.seed), engine_(cfg_.condition, cfg_.fitness, workers)
{
    cfg_.validate();
}

Genotype Evolution::random_genotype()
{
    Genotype g;
    const int count = cfg_.condition == Condition::Fractal ? 1 : 3;
    for (int k = 0; k < count; ++k)
        g.cppns.push_back(random_genome(rng_, cfg_.cppn));
    return g;
}

Genotype Evolution::mutate_genotype(const Genotype& parent)
{
    Genotype child = parent;
    if (child.cppns.size() == 1)
        child.cppns[0] = mutate(child.cppns[0], rng_, cfg_.cppn).child;
    else if (cfg_.control_mutation == ControlMutation::One)
    {
        const auto k = rng_.index(child.cppns.size());
        child.cppns[k] = mutate(child.cppns[k], rng_, cfg_.cppn).child;
    }
    else
        for (auto& g : child.cppns)
            g = mutate(g, rng_, cfg_.cppn).child;
    return child;
}

void Evolution::initialize()
{
    if (initialized())
        throw std::logic_error("evolution already initialized");
    population_.clear();
    for (int k = 0; k < cfg_.population_size; ++k)
    {
        Individual ind;
        ind.id = next_id_++;
        ind.genotype = random_genotype();
        population_.push_back(std::move(ind));
    }
    std::vector<Individual*> batch;
    for (auto& ind : population_)
        batch.push_back(&ind);
    engine_.evaluate(batch, 0);
    generation_ = 0;

    pool_.clear();
    for (const auto& ind : population_)
        pool_.push_back({ind, true});
    update_champion();
}

void Evolution::advance()
{
    if (!initialized())
        throw std::logic_error("evolution not initialized");
    ++generation_;
    for (auto& ind : population_)
        ++ind.age;

    const std::size_t n = population_.size();
    std::vector<Individual> pool = population_;
    while (pool.size() < 2 * n)
    {
        const Individual& parent = population_[rng_.index(n)];
        Individual child;
        child.id = next_id_++;
        child.parent = static_cast<std::int64_t>(parent.id);
        child.age = parent.age;
        child.genotype = mutate_genotype(parent.genotype);
        pool.push_back(std::move(child));
    }
    Individual fresh;
    fresh.id = next_id_++;
    fresh.genotype = random_genotype();
    pool.push_back(std::move(fresh));

    std::vector<Individual*> batch;
    for (std::size_t k = n; k < pool.size(); ++k)
        batch.push_back(&pool[k]);
    engine_.evaluate(batch, generation_);

    pool_.clear();
    for (auto& ind : pool)
        pool_.push_back({std::move(ind), false});
    reduce();
    update_champion();
}

void Evolution::reduce()
{
    std::vector<std::size_t> alive(pool_.size());
    std::iota(alive.begin(), alive.end(), 0);
    const auto target = static_cast<std::size_t>(cfg_.population_size);
    const auto at = [&](std::size_t k) -> const Individual& { return pool_[k].individual; };

    while (alive.size() > target)
    {
        std::vector<std::size_t> candidates;
        for (std::size_t a : alive)
            if (std::any_of(alive.begin(), alive.end(), [&](std::size_t b) { return dominates(at(b), at(a)); }))
                candidates.push_back(a);
        if (candidates.empty())
        {
            // The front itself is too large. Drop one of a pair of exact
            // (F, age) twins if there is one, else anyone but the best.
            for (std::size_t a : alive)
                if (std::any_of(alive.begin(), alive.end(), [&](std::size_t b) {
                        return a != b && at(a).record.F == at(b).record.F && at(a).age == at(b).age;
                    }))
                    candidates.push_back(a);
        }
        if (candidates.empty())
        {
            const auto best = *std::max_element(alive.begin(), alive.end(), [&](std::size_t a, std::size_t b) {
                return at(a).record.F < at(b).record.F;
            });
            for (std::size_t a : alive)
                if (a != best)
                    candidates.push_back(a);
        }
        const std::size_t victim = candidates[rng_.index(candidates.size())];
        alive.erase(std::find(alive.begin(), alive.end(), victim));
    }

    population_.clear();
    for (std::size_t k : alive)
    {
        pool_[k].survived = true;
        population_.push_back(pool_[k].individual);
    }
}

void Evolution::update_champion()
{
    for (const auto& entry : pool_)
        if (!has_champion_ || entry.individual.record.F > champion_.record.F)
        {
            champion_ = entry.individual;
            has_champion_ = true;
        }
}

json individual_to_json(const Individual& ind)
{
    json j;
    j["id"] = ind.id;
    j["parent"] = ind.parent;
    j["age"] = ind.age;
    j["fingerprint"] = fmt::format("{:016x}", genotype_fingerprint(ind.genotype));
    json cppns = json::array();
    for (const auto& g : ind.genotype.cppns)
        cppns.push_back(json::parse(genome_to_text(g)));
    j["cppns"] = std::move(cppns);
    j["record"] = record_to_json(ind.record);
    return j;
}

Individual individual_from_json(const json& j)
{
    Individual ind;
    ind.id = j.at("id").get<std::uint64_t>();
    ind.parent = j.at("parent").get<std::int64_t>();
    ind.age = j.at("age").get<int>();
    for (const auto& g : j.at("cppns"))
        ind.genotype.cppns.push_back(genome_from_text(g.dump()));
    ind.record = record_from_json(j.at("record"));
    return ind;
}

json record_to_json(const FitnessRecord& r)
{
    json j;
    j["d"] = r.d;
    j["F"] = r.F;
    j["H"] = r.H;
    j["c"] = r.c;
    j["age"] = r.age;
    j["generation"] = r.generation;
    j["flags"] = flags_to_string(r.flags);
    return j;
}

FitnessRecord record_from_json(const json& j)
{
    FitnessRecord r;
    r.d = j.at("d").get<std::vector<double>>();
    r.F = j.at("F").get<double>();
    r.H = j.at("H").get<double>();
    r.c = j.at("c").get<std::size_t>();
    r.age = j.at("age").get<int>();
    r.generation = j.at("generation").get<int>();
    r.flags = flags_from_string(j.at("flags").get<std::string>());
    return r;
}

json Evolution::save_state() const
{
    json j;
    j["generation"] = generation_;
    j["rng"] = rng_.state();
    j["next_id"] = next_id_;
    json pop = json::array();
    for (const auto& ind : population_)
        pop.push_back(individual_to_json(ind));
    j["population"] = std::move(pop);
    if (has_champion_)
        j["champion"] = individual_to_json(champion_);
    return j;
}

void Evolution::restore_state(const json& j)
{
    generation_ = j.at("generation").get<int>();
    rng_.restore(j.at("rng").get<std::string>());
    next_id_ = j.at("next_id").get<std::uint64_t>();
    population_.clear();
    for (const auto& ind : j.at("population"))
        population_.push_back(individual_from_json(ind));
    has_champion_ = j.contains("champion");
    if (has_champion_)
        champion_ = individual_from_json(j.at("champion"));
    pool_.clear();
}

std::vector<GenerationSummary> evolve(const EvolutionConfig& cfg, int workers,
                                      const std::function<void(const Evolution&)>& on_generation)
{
    Evolution evo(cfg, workers);
    std::vector<GenerationSummary> history;
    evo.initialize();
    while (true)
    {
        history.push_back({evo.generation(), evo.champion()});
        if (on_generation)
            on_generation(evo);
        if (evo.finished())
            break;
        evo.advance();
    }
    return history;
}

std::uint64_t genotype_fingerprint(const Genotype& g)
{
    std::uint64_t h = 14695981039346656037ull;
    for (const auto& genome : g.cppns)
        for (unsigned char ch : genome_to_text(genome))
        {
            h ^= ch;
            h *= 1099511628211ull;
        }
    return h;
}

int default_worker_count()
{
    if (const char* env = std::getenv("VOXFRACT_WORKERS"))
    {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

} // namespace voxfract
