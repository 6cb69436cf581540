#include "oracles/oracles.hpp"
#include "support.hpp"

#include "voxfract/evolution/evolution.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

using namespace voxfract;
using namespace testing_support;

namespace
{

Individual with(double F, int age)
{
    Individual ind;
    ind.age = age;
    ind.record.F = F;
    return ind;
}

EvolutionConfig quick(int population, int generations, std::vector<int> levels, std::uint64_t seed = 1)
{
    EvolutionConfig cfg;
    cfg.seed = seed;
    cfg.population_size = population;
    cfg.generations = generations;
    cfg.fitness.levels = std::move(levels);
    cfg.fitness.eval.duration = 1.0;
    return cfg;
}

CppnGenome genome_with_presence_bias(double bias)
{
    CppnGenome g = CppnGenome::minimal();
    for (auto& n : g.nodes)
        if (n.id == CppnGenome::kPresenceOutput)
            n.bias = bias;
    g.edges.push_back({0, CppnGenome::kPresenceOutput, 0.0});
    g.edges.push_back({0, CppnGenome::kMaterialOutput, 1.0});
    return g;
}

} // namespace

TEST(Afpo, Dominance)
{
    EXPECT_TRUE(dominates(with(2, 1), with(1, 1)));
    EXPECT_TRUE(dominates(with(1, 0), with(1, 1)));
    EXPECT_TRUE(dominates(with(2, 0), with(1, 3)));
    EXPECT_FALSE(dominates(with(1, 1), with(1, 1)));
    EXPECT_FALSE(dominates(with(2, 3), with(1, 0)));
    EXPECT_FALSE(dominates(with(1, 2), with(2, 2)));
}

TEST(Fitness, MinAcrossLevels)
{
    const FitnessConfig cfg = quick(4, 1, {0, 1}).fitness;
    Phenotype p = design_phenotype(l_shape(), cfg);
    ASSERT_EQ(p.flags, kFlagNone);
    const FitnessRecord r = evaluate_phenotype(p, cfg);
    ASSERT_EQ(r.d.size(), 2u);
    EXPECT_EQ(r.F, std::min(r.d[0], r.d[1]));
    EXPECT_GT(r.d[0], 0.0);
    EXPECT_TRUE(std::isfinite(r.d[1]));
    EXPECT_EQ(r.c, 7u);
    EXPECT_DOUBLE_EQ(r.H, std::log(7.0) / std::log(3.0));
}

TEST(Fitness, DegenerateGenomesScoreZero)
{
    FitnessConfig cfg = quick(4, 1, {0, 1, 2}).fitness;
    const FitnessRecord empty = fitness(genome_with_presence_bias(-1.0), cfg);
    EXPECT_EQ(empty.F, 0.0);
    EXPECT_EQ(empty.flags, kFlagEmpty);
    EXPECT_EQ(empty.d, std::vector<double>(3, 0.0));
    EXPECT_EQ(empty.H, 0.0);

    // Full 3^3 cube: level 2 has 19683 voxels, over a small budget.
    cfg.eval.voxel_budget = 1000;
    const FitnessRecord budget = fitness(genome_with_presence_bias(1.0), cfg);
    EXPECT_EQ(budget.flags, kFlagBudget);
    EXPECT_EQ(budget.F, 0.0);
    EXPECT_EQ(budget.c, 27u);

    const FitnessRecord ctl =
        fitness_control({genome_with_presence_bias(1.0), genome_with_presence_bias(-1.0), genome_with_presence_bias(1.0)},
                        quick(4, 1, {0, 1}).fitness);
    EXPECT_EQ(ctl.flags, kFlagEmpty);
    EXPECT_EQ(ctl.F, 0.0);
    EXPECT_EQ(ctl.c, 27u);
}

TEST(Fitness, FlagStrings)
{
    EXPECT_EQ(flags_to_string(kFlagNone), "");
    EXPECT_EQ(flags_to_string(kFlagEmpty | kFlagDiverged), "empty|diverged");
    EXPECT_EQ(flags_from_string("empty|diverged"), kFlagEmpty | kFlagDiverged);
    EXPECT_EQ(flags_from_string(""), kFlagNone);
    EXPECT_THROW(flags_from_string("bogus"), std::invalid_argument);
}

TEST(Control, MirrorPhenotypeEqualsFractal)
{
    Rng rng(21);
    const FitnessConfig cfg = quick(4, 1, {0, 1, 2}).fitness;
    int compared = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const CppnGenome g = random_genome(rng);
        const Phenotype f = fractal_phenotype(g, cfg);
        const Phenotype c = control_phenotype({g, g, g}, cfg);
        EXPECT_EQ(f.flags, c.flags);
        EXPECT_EQ(f.c, c.c);
        EXPECT_EQ(f.H, c.H);
        ASSERT_EQ(f.structures.size(), c.structures.size());
        for (std::size_t k = 0; k < f.structures.size(); ++k)
            EXPECT_EQ(f.structures[k], c.structures[k]);
        compared += f.flags == kFlagNone;
    }
    EXPECT_GT(compared, 20);
}

TEST(Control, MirrorRecordIsBitIdentical)
{
    Rng rng(5);
    const FitnessConfig cfg = quick(4, 1, {0, 1}).fitness;
    int simulated = 0;
    while (simulated < 2)
    {
        const CppnGenome g = random_genome(rng);
        const Phenotype p = fractal_phenotype(g, cfg);
        if (p.flags != kFlagNone || p.c > 12)
            continue;
        EXPECT_EQ(fitness(g, cfg), fitness_control({g, g, g}, cfg));
        ++simulated;
    }
}

TEST(Control, AggregatesMatchPlacementOracle)
{
    Rng rng(44);
    const FitnessConfig cfg = quick(4, 1, {0, 1, 2}).fitness;
    int built = 0;
    for (int trial = 0; trial < 300; ++trial)
    {
        const std::array<CppnGenome, 3> g = {random_genome(rng), random_genome(rng), random_genome(rng)};
        const Phenotype p = control_phenotype(g, cfg);
        if (p.flags != kFlagNone)
            continue;
        const Polycube basal = decode(g[0], 3), middle = decode(g[1], 3), top = decode(g[2], 3);
        const auto l1 = oracle::control_by_digits(basal, middle, nullptr);
        const auto l2 = oracle::control_by_digits(basal, middle, &top);
        EXPECT_EQ(p.structures[0], basal);
        EXPECT_EQ(std::vector<Voxel>(p.structures[1].voxels().begin(), p.structures[1].voxels().end()), l1);
        EXPECT_EQ(std::vector<Voxel>(p.structures[2].voxels().begin(), p.structures[2].voxels().end()), l2);
        ++built;
    }
    EXPECT_GT(built, 10);
}

TEST(Control, FullPlacementFillsTheArrangement)
{
    const FitnessConfig cfg = quick(4, 1, {0, 1}).fitness;
    const CppnGenome full = genome_with_presence_bias(1.0);
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial)
    {
        const CppnGenome basal = random_genome(rng);
        const Phenotype p = control_phenotype({basal, full, full}, cfg);
        if (p.flags != kFlagNone)
            continue;
        EXPECT_EQ(p.structures[1].size(), 27 * p.c);
    }
}

TEST(Fitness, SingleVoxelIsScaleDegenerate)
{
    FitnessConfig cfg = quick(4, 1, {0, 1, 2}).fitness;
    const Phenotype p = design_phenotype(Polycube(3, {{{1, 1, 0}, Material::PhaseA}}), cfg);
    ASSERT_EQ(p.flags, kFlagNone);
    for (const auto& s : p.structures)
        EXPECT_EQ(s.size(), 1u);
    const FitnessRecord r = evaluate_phenotype(p, cfg);
    // One voxel pulses in place: no net travel at any level.
    for (double d : r.d)
        EXPECT_LT(d, 1e-9);
}

TEST(Control, RejectsDeepLevels)
{
    FitnessConfig cfg;
    cfg.levels = {0, 3};
    EXPECT_NO_THROW(cfg.validate(Condition::Fractal));
    EXPECT_THROW(cfg.validate(Condition::Control), std::invalid_argument);
}

TEST(Evolution, PopulationInvariants)
{
    Evolution evo(quick(6, 4, {0}, 3), 1);
    evo.initialize();
    double best = evo.champion().record.F;
    std::set<std::uint64_t> ids;
    while (!evo.finished())
    {
        const double pop_best_before = std::max_element(evo.population().begin(), evo.population().end(),
                                                        [](const auto& a, const auto& b) {
                                                            return a.record.F < b.record.F;
                                                        })->record.F;
        evo.advance();
        EXPECT_EQ(evo.population().size(), 6u);
        EXPECT_EQ(evo.pool().size(), 13u);
        std::size_t survivors = 0;
        for (const auto& e : evo.pool())
        {
            survivors += e.survived;
            ids.insert(e.individual.id);
        }
        EXPECT_EQ(survivors, 6u);
        // The fresh random individual is last and has age 0.
        EXPECT_EQ(evo.pool().back().individual.age, 0);
        EXPECT_EQ(evo.pool().back().individual.parent, -1);
        double pop_best = 0.0;
        for (const auto& ind : evo.population())
            pop_best = std::max(pop_best, ind.record.F);
        EXPECT_GE(pop_best, pop_best_before);
        EXPECT_GE(evo.champion().record.F, best);
        best = evo.champion().record.F;
        for (const auto& a : evo.population())
            EXPECT_LE(a.record.F, evo.champion().record.F);
    }
    EXPECT_EQ(evo.generation(), 4);
}

TEST(Evolution, AgeCountsGenerationsSinceLineageRoot)
{
    Evolution evo(quick(5, 5, {0}, 17), 1);
    evo.initialize();
    std::map<std::uint64_t, int> root_birth; // id -> generation its random ancestor appeared
    for (const auto& e : evo.pool())
        root_birth[e.individual.id] = 0;
    while (!evo.finished())
    {
        evo.advance();
        for (const auto& e : evo.pool())
        {
            const Individual& ind = e.individual;
            if (!root_birth.count(ind.id))
                root_birth[ind.id] = ind.parent < 0 ? evo.generation() : root_birth.at(static_cast<std::uint64_t>(ind.parent));
            EXPECT_EQ(ind.age, evo.generation() - root_birth.at(ind.id)) << "id " << ind.id;
        }
    }
}

TEST(Evolution, WorkerCountDoesNotChangeResults)
{
    const EvolutionConfig cfg = quick(5, 3, {0}, 9);
    std::vector<std::vector<PoolEntry>> pools[2];
    int slot = 0;
    for (int workers : {1, 4})
    {
        evolve(cfg, workers, [&](const Evolution& e) { pools[slot].push_back(e.pool()); });
        ++slot;
    }
    ASSERT_EQ(pools[0].size(), 4u);
    for (std::size_t g = 0; g < pools[0].size(); ++g)
    {
        ASSERT_EQ(pools[0][g].size(), pools[1][g].size());
        for (std::size_t k = 0; k < pools[0][g].size(); ++k)
        {
            EXPECT_EQ(pools[0][g][k].individual, pools[1][g][k].individual);
            EXPECT_EQ(pools[0][g][k].survived, pools[1][g][k].survived);
        }
    }
}

TEST(Evolution, SaveRestoreContinuesIdentically)
{
    const EvolutionConfig cfg = quick(4, 4, {0}, 13);
    Evolution a(cfg, 1);
    a.initialize();
    a.advance();
    const auto state = a.save_state();
    Evolution b(cfg, 1);
    b.restore_state(nlohmann::ordered_json::parse(state.dump()));
    EXPECT_EQ(b.generation(), 1);
    while (!a.finished())
    {
        a.advance();
        b.advance();
        EXPECT_EQ(a.population(), b.population());
        EXPECT_EQ(a.champion(), b.champion());
    }
}

TEST(Evolution, ControlConditionRuns)
{
    EvolutionConfig cfg = quick(4, 2, {0, 1}, 2);
    cfg.condition = Condition::Control;
    cfg.control_mutation = ControlMutation::All;
    Evolution evo(cfg, 1);
    evo.initialize();
    evo.advance();
    for (const auto& e : evo.pool())
        EXPECT_EQ(e.individual.genotype.cppns.size(), 3u);
}

TEST(Evolution, IndividualJsonRoundTrip)
{
    Evolution evo(quick(3, 1, {0}, 4), 1);
    evo.initialize();
    for (const auto& ind : evo.population())
    {
        const auto j = nlohmann::ordered_json::parse(individual_to_json(ind).dump());
        EXPECT_EQ(individual_from_json(j), ind);
    }
}
