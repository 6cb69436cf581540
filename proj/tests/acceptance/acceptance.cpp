// Acceptance checks 1-8. Usage: voxfract_acceptance [--workdir DIR] [N ...]
// Prints one PASS/FAIL line per criterion; exit status 1 if any failed.

#include "../oracles/oracles.hpp"
#include "../support.hpp"

#include "voxfract/errors.hpp"
#include "voxfract/harness/report.hpp"
#include "voxfract/harness/run.hpp"
#include "voxfract/physics/bvh.hpp"
#include "voxfract/physics/simulation.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>

using namespace voxfract;
using namespace testing_support;

namespace
{

struct Outcome
{
    bool pass = true;
    std::vector<std::string> notes;

    void check(bool ok, const std::string& what)
    {
        if (!ok)
        {
            pass = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(std::string s) { notes.push_back(std::move(s)); }
};

fs::path g_workdir = fs::temp_directory_path() / "voxfract_acceptance";

fs::path fresh(const std::string& name)
{
    const fs::path dir = g_workdir / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void c1_hausdorff(Outcome& o)
{
    o.check(std::fabs(hausdorff_dimension(20, 3) - 2.727) <= 1e-3, "H(20,3) = 2.727 +- 0.001");
    o.check(hausdorff_dimension(3, 3) == 1.0, "H(3,3) = 1");
    o.check(hausdorff_dimension(9, 3) == 2.0, "H(9,3) = 2");
    o.check(hausdorff_dimension(27, 3) == 3.0, "H(27,3) = 3");
    o.note(fmt::format("H(20,3) = {:.6f}", hausdorff_dimension(20, 3)));
}

void c2_menger(Outcome& o)
{
    const Polycube sponge = menger_sponge();
    std::vector<std::size_t> counts;
    for (int level = 0; level <= 2; ++level)
    {
        const Polycube p = fractalize(sponge, level);
        counts.push_back(p.size());
        o.check(is_face_connected(p.extent(), p.voxels()), fmt::format("level {} connected", level));
    }
    o.check(counts == std::vector<std::size_t>{20, 400, 8000}, "counts 20/400/8000");
    o.note(fmt::format("counts {}/{}/{}", counts[0], counts[1], counts[2]));
}

void c3_oracles(Outcome& o)
{
    Rng rng(3);
    int lcc_bad = 0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const OccupancyGrid grid = random_grid(rng, 2 + static_cast<int>(rng.below(5)), rng.uniform(0.05, 0.7));
        const auto want = oracle::flood_fill_lcc(grid);
        if (want.empty())
            continue;
        const Polycube got = largest_connected_component(grid);
        lcc_bad += std::vector<Voxel>(got.voxels().begin(), got.voxels().end()) != want;
    }
    o.check(lcc_bad == 0, fmt::format("LCC vs flood fill ({} mismatches of 200)", lcc_bad));

    int fractal_bad = 0, fractal_cases = 0;
    for (int trial = 0; trial < 60; ++trial)
    {
        const OccupancyGrid grid = random_grid(rng, 3, 0.6);
        if (grid.occupied_count() == 0)
            continue;
        const Polycube basal = largest_connected_component(grid);
        for (int level = 0; level <= 2; ++level)
        {
            const auto want = oracle::fractal_by_digits(basal, level);
            try
            {
                const Polycube got = fractalize(basal, level);
                fractal_bad += std::vector<Voxel>(got.voxels().begin(), got.voxels().end()) != want;
            }
            catch (const DisconnectedComposition&)
            {
                fractal_bad += is_face_connected(integer_power(3, level + 1), want);
            }
            ++fractal_cases;
        }
    }
    o.check(fractal_bad == 0, fmt::format("fractalize vs digit oracle ({} of {})", fractal_bad, fractal_cases));

    int bvh_bad = 0;
    for (int trial = 0; trial < 500; ++trial)
    {
        std::vector<Vec3> pts(1 + rng.below(150));
        const double spread = rng.uniform(0.5, 6.0);
        for (auto& p : pts)
            p = {rng.uniform(0, spread), rng.uniform(0, spread), rng.uniform(0, spread)};
        bvh_bad += find_close_pairs(pts, 1.0) != oracle::close_pairs(pts, 1.0);
    }
    o.check(bvh_bad == 0, fmt::format("BVH vs double loop ({} of 500)", bvh_bad));

    double cppn_err = 0.0;
    for (int trial = 0; trial < 300; ++trial)
    {
        CppnGenome g = random_genome(rng);
        for (int k = 0; k < 5; ++k)
            g = mutate(g, rng).child;
        const CppnEvaluator eval(g);
        for (int s = 0; s < 10; ++s)
        {
            const double x = rng.uniform(-1, 1), y = rng.uniform(-1, 1), z = rng.uniform(-1, 1);
            const CppnOutput a = eval(x, y, z), b = oracle::interpret_cppn(g, x, y, z);
            cppn_err = std::max({cppn_err, std::fabs(a.presence - b.presence), std::fabs(a.material - b.material)});
        }
    }
    o.check(cppn_err <= 1e-12, fmt::format("CPPN vs interpreter (max error {:.3g})", cppn_err));

    double p_err = 0.0;
    int cases = 0;
    for (std::size_t na = 3; na <= 9; ++na)
        for (std::size_t nb = 3; na + nb <= kExactRankSumLimit; ++nb)
            for (int rep = 0; rep < 3; ++rep)
            {
                std::vector<double> a(na), b(nb);
                for (auto& v : a)
                    v = std::floor(rng.uniform() * (rep == 0 ? 4.0 : 100.0));
                for (auto& v : b)
                    v = std::floor(rng.uniform() * (rep == 0 ? 4.0 : 100.0)) + rep;
                p_err = std::max(p_err, std::fabs(wilcoxon_rank_sum(a, b).p - oracle::rank_sum_p_by_enumeration(a, b)));
                ++cases;
            }
    o.check(p_err <= 1e-12, fmt::format("exact Wilcoxon vs enumeration (max error {:.3g} over {} cases)", p_err, cases));
}

SimState single_voxel(SolverParams solver)
{
    MaterialParams m;
    m.volume_amplitude = 0.0;
    return build_sim(box(1, 1, 1), ActuationMode::AntiPhase, m, solver);
}

void advance(SimState& s, double seconds)
{
    const double dt = stable_timestep(*s.lattice);
    const auto n = static_cast<std::size_t>(std::llround(seconds / dt));
    for (std::size_t k = 0; k < n; ++k)
        step(s, dt);
}

void c4_physics(Outcome& o)
{
    Rng rng(4);
    const double L = 0.01;
    const BeamStiffness k = BeamStiffness::for_voxel(1e4, 1e4 / 3.0, L);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial)
    {
        const int axis = static_cast<int>(rng.below(3));
        auto rot = [&] { return quat_from_rotation_vector({rng.uniform(-.4, .4), rng.uniform(-.4, .4), rng.uniform(-.4, .4)}); };
        const Quat qi = rot(), qj = rot();
        Vec3 off{};
        off[axis] = L * rng.uniform(0.7, 1.3);
        const Vec3 pi{rng.uniform(-L, L), rng.uniform(-L, L), rng.uniform(-L, L)};
        const Vec3 pj = pi + off + Vec3{rng.uniform(-.2, .2), rng.uniform(-.2, .2), rng.uniform(-.2, .2)} * L;
        const double rest = L * rng.uniform(0.8, 1.2);
        auto energy = [&](const std::vector<double>& x) {
            return beam_energy(k, axis, rest,
                               {{x[0], x[1], x[2]}, to_matrix(quat_from_rotation_vector({x[6], x[7], x[8]}) * qi)},
                               {{x[3], x[4], x[5]}, to_matrix(quat_from_rotation_vector({x[9], x[10], x[11]}) * qj)});
        };
        const std::vector<double> x0 = {pi.x, pi.y, pi.z, pj.x, pj.y, pj.z, 0, 0, 0, 0, 0, 0};
        const auto gp = oracle::numeric_gradient(energy, x0, 1e-7 * L);
        const auto gr = oracle::numeric_gradient(energy, x0, 1e-6);
        const BeamLoad load = beam_load(k, axis, rest, {pi, to_matrix(qi)}, {pj, to_matrix(qj)});
        const double scale = std::max({norm(load.force_i), norm(load.torque_i), norm(load.torque_j)});
        for (int c = 0; c < 3; ++c)
        {
            const double e = std::max({std::fabs(load.force_i[c] + gp[c]), std::fabs(load.force_j[c] + gp[3 + c]),
                                       std::fabs(load.torque_i[c] + gr[6 + c]), std::fabs(load.torque_j[c] + gr[9 + c])});
            worst = std::max(worst, (e - 1e-6) / scale);
        }
    }
    o.check(worst <= 1e-4, fmt::format("beam loads vs finite differences (worst relative {:.3g})", worst));

    double residual = 0.0;
    for (int trial = 0; trial < 20; ++trial)
    {
        SimState s = build_sim(largest_connected_component(random_grid(rng, 3, 0.7)), ActuationMode::AntiPhase);
        for (std::size_t m = 0; m < s.size(); ++m)
        {
            s.position[m] += Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)} * 1e-3;
            s.velocity[m] = {rng.uniform(-.1, .1), rng.uniform(-.1, .1), rng.uniform(-.1, .1)};
        }
        std::vector<Vec3> f(s.size()), t(s.size());
        accumulate_beam_loads(s, f, t);
        Vec3 net;
        for (const Vec3& v : f)
            net += v;
        residual = std::max(residual, norm(net));
    }
    o.check(residual < 1e-9, fmt::format("Newton third law residual {:.3g} N", residual));

    SolverParams free;
    free.global_damping = 1.0;
    free.ground = false;
    SimState fall = single_voxel(free);
    const double z0 = fall.position[0].z;
    for (int n = 0; n < 100'000; ++n)
        step(fall, 1e-5);
    const double rel = std::fabs((z0 - fall.position[0].z) / (0.5 * 9.81 * fall.time * fall.time) - 1.0);
    o.check(rel <= 1e-4, fmt::format("free fall relative error {:.3g}", rel));

    SolverParams passive;
    passive.gravity = 0.0;
    passive.ground = false;
    MaterialParams still;
    still.volume_amplitude = 0.0;
    SimState spin = build_sim(box(3, 2, 2), ActuationMode::AntiPhase, still, passive);
    for (std::size_t m = 0; m < spin.size(); ++m)
    {
        spin.velocity[m] = {rng.uniform(-.05, .05), rng.uniform(-.05, .05), rng.uniform(-.05, .05)};
        spin.angular_velocity[m] = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    }
    const double dt = stable_timestep(*spin.lattice);
    double previous = kinetic_energy(spin) + elastic_energy(spin);
    bool monotone = true;
    for (int n = 0; n < 20'000; ++n)
    {
        step(spin, dt);
        const double e = kinetic_energy(spin) + elastic_energy(spin);
        monotone = monotone && e <= previous * (1.0 + 1e-9);
        previous = e;
    }
    o.check(monotone, "passive energy non-increasing at every step");

    SimState rest = build_sim(box(3, 3, 3), ActuationMode::AntiPhase, still);
    const Vec3 a = center_of_mass(rest);
    advance(rest, 1.0);
    const Vec3 b = center_of_mass(rest);
    const double drift = std::hypot(b.x - a.x, b.y - a.y) / 0.03 / rest.time;
    o.check(drift < 1e-3, fmt::format("resting drift {:.3g} body lengths/s", drift));
}

void c5_determinism(Outcome& o)
{
    const ExperimentConfig cfg = parse_config(small_config(4, 2, "[0, 1]", 5));
    const fs::path a = fresh("c5_a"), b = fresh("c5_b"), c = fresh("c5_c");
    run_trial(cfg, a, 1);
    run_trial(cfg, b, 1);
    run_trial(cfg, c, 4);
    const std::string ref = read_text(a / "fitness.csv");
    o.check(ref == read_text(b / "fitness.csv"), "two runs, 1 worker: identical fitness.csv");
    o.check(ref == read_text(c / "fitness.csv"), "1 vs 4 workers: identical fitness.csv");
    o.note(fmt::format("fitness.csv {} bytes", ref.size()));
}

CppnGenome biased(double presence_bias)
{
    CppnGenome g = CppnGenome::minimal();
    for (auto& n : g.nodes)
        if (n.id == CppnGenome::kPresenceOutput)
            n.bias = presence_bias;
    g.edges = {{0, CppnGenome::kPresenceOutput, 0.0}, {0, CppnGenome::kMaterialOutput, 1.0}};
    return g;
}

void c6_pipeline(Outcome& o)
{
    FitnessConfig cfg;
    cfg.levels = {0, 1};

    FitnessRecord r;
    const std::vector<std::vector<double>> ds = {{0.5, 0.2}, {-0.1, 0.3}, {1.0, 1.0}};
    for (const auto& d : ds)
    {
        r.d = d;
        r.F = *std::min_element(d.begin(), d.end());
        o.check(r.F == std::min(d[0], d[1]), "F is the minimum over levels");
    }

    const FitnessRecord l = evaluate_phenotype(design_phenotype(l_shape(), cfg), cfg);
    o.check(l.d[0] > 0.0, "L-shape d > 0 at level 0");
    o.check(std::isfinite(l.d[1]), "L-shape d finite at level 1");
    o.check(l.F == std::min(l.d[0], l.d[1]), "L-shape F = min(d)");
    o.note(fmt::format("L-shape d = [{:.6g}, {:.6g}]", l.d[0], l.d[1]));

    FitnessConfig deep = cfg;
    deep.levels = {0, 1, 2};
    deep.eval.voxel_budget = 1000;
    const FitnessRecord empty = fitness(biased(-1.0), deep);
    o.check(empty.F == 0.0 && empty.flags == kFlagEmpty, "empty genome: F = 0, flag empty");
    const FitnessRecord budget = fitness(biased(1.0), deep);
    o.check(budget.F == 0.0 && budget.flags == kFlagBudget, "oversized genome: F = 0, flag budget");
    const FitnessRecord ctl = fitness_control({biased(1.0), biased(-1.0), biased(1.0)}, cfg);
    o.check(ctl.F == 0.0 && ctl.flags == kFlagEmpty, "control with empty part: F = 0, flag empty");

    // Random genomes: some decode to disconnected fractals; none may throw.
    Rng rng(6);
    int disconnected = 0;
    for (int k = 0; k < 300; ++k)
    {
        const Phenotype p = fractal_phenotype(random_genome(rng), deep);
        disconnected += (p.flags & kFlagDisconnected) != 0;
        if (p.flags != kFlagNone)
            o.check(evaluate_phenotype(p, deep).F == 0.0, "flagged phenotype scores 0");
    }
    o.note(fmt::format("{} of 300 random genomes flagged disconnected", disconnected));
}

void c7_evolution(Outcome& o)
{
    const ExperimentConfig cfg =
        parse_config("schema_version: 1\nseed: 1\ntrials: 5\npopulation_size: 16\ngenerations: 20\n"
                     "workspace: 3\nscale_levels: [0, 1]\nmode: antiphase\n");
    const fs::path out = fresh("c7");
    const auto start = std::chrono::steady_clock::now();
    run_experiment(cfg, out, default_worker_count(), &std::cerr);
    const double minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60.0;

    int improved = 0;
    bool monotone = true;
    std::string finals;
    for (const auto& run : find_runs(out))
    {
        const ChampionCurve c = read_champion_curve(run);
        for (std::size_t k = 1; k < c.F.size(); ++k)
            monotone = monotone && c.F[k] >= c.F[k - 1];
        const bool up = c.generation.back() == 20 && c.F.back() > c.F.front();
        improved += up;
        finals += fmt::format(" {:.4g}->{:.4g}", c.F.front(), c.F.back());
    }
    o.check(improved >= 4, fmt::format("champion F improved in {}/5 seeds (need 4)", improved));
    o.check(monotone, "champion curves monotone");
    o.note(fmt::format("gen 0 -> 20 champion F:{}", finals));
    o.note(fmt::format("wall time {:.1f} min with {} worker(s) (target 30)", minutes, default_worker_count()));
}

void c8_control(Outcome& o)
{
    FitnessConfig fc;
    fc.levels = {0, 1};
    Rng rng(8);
    int mirrored = 0, identical = 0;
    while (mirrored < 5)
    {
        const CppnGenome g = random_genome(rng);
        const Phenotype p = fractal_phenotype(g, fc);
        if (p.flags != kFlagNone || p.c > 15)
            continue;
        identical += fitness(g, fc) == fitness_control({g, g, g}, fc);
        ++mirrored;
    }
    o.check(identical == mirrored, fmt::format("mirrored control records bit-identical ({}/{})", identical, mirrored));

    const std::string base =
        "schema_version: 1\nseed: 100\ntrials: 5\npopulation_size: 6\ngenerations: 4\nscale_levels: [0, 1]\n";
    const fs::path fractal = fresh("c8_fractal"), control = fresh("c8_control"), report_dir = fresh("c8_report");
    run_experiment(parse_config(base + "condition: fractal\n"), fractal, default_worker_count(), &std::cerr);
    run_experiment(parse_config(base + "condition: control\n"), control, default_worker_count(), &std::cerr);
    const ComparisonReport report = compare_groups({fractal}, {control}, 1);
    write_report(report, report_dir, 5.0);
    const auto j = nlohmann::json::parse(read_text(report_dir / "report.json"));
    o.check(report.a.runs.size() == 5 && report.b.runs.size() == 5, "5 runs per group");
    o.check(j.at("wilcoxon").at("exact").get<bool>(), "exact test used (n_a + n_b = 10)");
    const double p = j.at("wilcoxon").at("p").get<double>();
    o.check(p > 0.0 && p <= 1.0, "p in (0, 1]");
    o.check(j.contains("direction"), "direction reported");
    o.note(fmt::format("fractal vs control: U = {}, p = {:.4g}, direction {}", report.test.U, p, report.direction));
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::pair<const char*, std::function<void(Outcome&)>>> criteria = {
        {1, {"Hausdorff golden values", c1_hausdorff}},
        {2, {"Menger fractalization counts", c2_menger}},
        {3, {"oracle equivalence suite", c3_oracles}},
        {4, {"physics numerical checks", c4_physics}},
        {5, {"determinism across runs and workers", c5_determinism}},
        {6, {"scale-invariance pipeline smoke", c6_pipeline}},
        {7, {"desk-scale evolution effect", c7_evolution}},
        {8, {"control-condition consistency", c8_control}},
    };
    std::vector<int> selected;
    for (int k = 1; k < argc; ++k)
    {
        const std::string arg = argv[k];
        if (arg == "--workdir" && k + 1 < argc)
            g_workdir = argv[++k];
        else
            selected.push_back(std::stoi(arg));
    }
    if (selected.empty())
        for (const auto& [n, c] : criteria)
            selected.push_back(n);

    bool all = true;
    for (int n : selected)
    {
        const auto it = criteria.find(n);
        if (it == criteria.end())
        {
            fmt::print(stderr, "unknown criterion {}\n", n);
            return 2;
        }
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try
        {
            it->second.second(o);
        }
        catch (const std::exception& e)
        {
            o.check(false, std::string("exception: ") + e.what());
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        for (const auto& note : o.notes)
            fmt::print("  criterion {}: {}\n", n, note);
        fmt::print("criterion {}: {} - {} ({:.1f} s)\n", n, o.pass ? "PASS" : "FAIL", it->second.first, seconds);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
