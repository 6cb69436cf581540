#include "voxfract/harness/config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace voxfract
{

namespace
{

class Reader
{
  public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Mark& mark, const std::string& message) const
    {
        if (mark.is_null())
            throw ConfigError(fmt::format("{}: {}", source_, message));
        throw ConfigError(fmt::format("{}:{}:{}: {}", source_, mark.line + 1, mark.column + 1, message));
    }

    template <typename T>
    T scalar(const YAML::Node& node, const std::string& key) const
    {
        if (!node.IsScalar())
            fail(node.Mark(), fmt::format("'{}' must be a scalar", key));
        try
        {
            return node.as<T>();
        }
        catch (const YAML::Exception&)
        {
            fail(node.Mark(), fmt::format("'{}' has an invalid value '{}'", key, node.Scalar()));
        }
    }

    double positive(const YAML::Node& node, const std::string& key) const
    {
        const double v = scalar<double>(node, key);
        if (!(v > 0.0) || !std::isfinite(v))
            fail(node.Mark(), fmt::format("'{}' must be positive", key));
        return v;
    }

    double in_range(const YAML::Node& node, const std::string& key, double lo, double hi, bool lo_open,
                    bool hi_open) const
    {
        const double v = scalar<double>(node, key);
        const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
        if (!ok)
            fail(node.Mark(), fmt::format("'{}' must be in {}{}, {}{}", key, lo_open ? '(' : '[', lo, hi,
                                          hi_open ? ')' : ']'));
        return v;
    }

    int integer_at_least(const YAML::Node& node, const std::string& key, int lo) const
    {
        const int v = scalar<int>(node, key);
        if (v < lo)
            fail(node.Mark(), fmt::format("'{}' must be >= {}", key, lo));
        return v;
    }

    using Handler = std::function<void(const YAML::Node&)>;

    /// Dispatches every key of `map` to its handler; unknown keys are errors.
    void fields(const YAML::Node& map, const std::string& section, const std::map<std::string, Handler>& handlers) const
    {
        if (!map.IsMap())
            fail(map.Mark(), fmt::format("'{}' must be a mapping", section));
        for (auto it = map.begin(); it != map.end(); ++it)
        {
            const std::string key = it->first.as<std::string>();
            auto h = handlers.find(key);
            if (h == handlers.end())
                fail(it->first.Mark(), section.empty() ? fmt::format("unknown key '{}'", key)
                                                       : fmt::format("unknown key '{}' in '{}'", key, section));
            h->second(it->second);
        }
    }

  private:
    std::string source_;
};

std::string number(double v)
{
    return fmt::format("{}", v);
}

} // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& source)
{
    const Reader in(source);
    YAML::Node root;
    try
    {
        root = YAML::Load(text);
    }
    catch (const YAML::ParserException& e)
    {
        in.fail(e.mark, e.msg);
    }
    if (!root.IsDefined() || root.IsNull())
        in.fail(YAML::Mark::null_mark(), "empty configuration");
    if (!root.IsMap())
        in.fail(root.Mark(), "configuration must be a mapping");
    if (!root["schema_version"])
        in.fail(root.Mark(), "missing 'schema_version'");

    ExperimentConfig cfg;
    EvolutionConfig& evo = cfg.evolution;
    FitnessConfig& fit = evo.fitness;
    MaterialParams& mat = fit.eval.material;
    SolverParams& sol = fit.eval.solver;
    YAML::Mark levels_mark = YAML::Mark::null_mark();

    in.fields(root, "",
              {
                  {"schema_version",
                   [&](const YAML::Node& n) {
                       if (in.scalar<int>(n, "schema_version") != kConfigSchemaVersion)
                           in.fail(n.Mark(), fmt::format("unsupported schema_version (expected {})",
                                                         kConfigSchemaVersion));
                   }},
                  {"seed", [&](const YAML::Node& n) { evo.seed = in.scalar<std::uint64_t>(n, "seed"); }},
                  {"trials", [&](const YAML::Node& n) { cfg.trials = in.integer_at_least(n, "trials", 1); }},
                  {"population_size",
                   [&](const YAML::Node& n) { evo.population_size = in.integer_at_least(n, "population_size", 2); }},
                  {"generations",
                   [&](const YAML::Node& n) { evo.generations = in.integer_at_least(n, "generations", 0); }},
                  {"condition",
                   [&](const YAML::Node& n) {
                       auto c = parse_condition(in.scalar<std::string>(n, "condition"));
                       if (!c)
                           in.fail(n.Mark(), "'condition' must be fractal or control");
                       evo.condition = *c;
                   }},
                  {"control_mutation",
                   [&](const YAML::Node& n) {
                       auto m = parse_control_mutation(in.scalar<std::string>(n, "control_mutation"));
                       if (!m)
                           in.fail(n.Mark(), "'control_mutation' must be one or all");
                       evo.control_mutation = *m;
                   }},
                  {"workspace", [&](const YAML::Node& n) { fit.workspace = in.integer_at_least(n, "workspace", 2); }},
                  {"scale_levels",
                   [&](const YAML::Node& n) {
                       if (!n.IsSequence() || n.size() == 0)
                           in.fail(n.Mark(), "'scale_levels' must be a non-empty list");
                       fit.levels.clear();
                       for (const auto& item : n)
                       {
                           const int level = in.integer_at_least(item, "scale_levels", 0);
                           if (!fit.levels.empty() && level <= fit.levels.back())
                               in.fail(item.Mark(), "'scale_levels' must be strictly increasing");
                           fit.levels.push_back(level);
                       }
                       levels_mark = n.Mark();
                   }},
                  {"mode",
                   [&](const YAML::Node& n) {
                       auto m = parse_actuation_mode(in.scalar<std::string>(n, "mode"));
                       if (!m)
                           in.fail(n.Mark(), "'mode' must be antiphase, wave or bladder");
                       fit.mode = *m;
                   }},
                  {"voxel_size", [&](const YAML::Node& n) { fit.voxel_size = in.positive(n, "voxel_size"); }},
                  {"duration", [&](const YAML::Node& n) { fit.eval.duration = in.positive(n, "duration"); }},
                  {"voxel_budget",
                   [&](const YAML::Node& n) {
                       fit.eval.voxel_budget = static_cast<std::size_t>(in.integer_at_least(n, "voxel_budget", 1));
                   }},
                  {"cppn",
                   [&](const YAML::Node& n) {
                       in.fields(n, "cppn",
                                 {
                                     {"min_hidden",
                                      [&](const YAML::Node& v) {
                                          evo.cppn.min_hidden = in.integer_at_least(v, "min_hidden", 0);
                                      }},
                                     {"max_hidden",
                                      [&](const YAML::Node& v) {
                                          evo.cppn.max_hidden = in.integer_at_least(v, "max_hidden", 0);
                                      }},
                                     {"perturb_sigma",
                                      [&](const YAML::Node& v) {
                                          evo.cppn.perturb_sigma = in.positive(v, "perturb_sigma");
                                      }},
                                     {"max_mutation_attempts",
                                      [&](const YAML::Node& v) {
                                          evo.cppn.max_mutation_attempts =
                                              in.integer_at_least(v, "max_mutation_attempts", 1);
                                      }},
                                 });
                   }},
                  {"material",
                   [&](const YAML::Node& n) {
                       in.fields(
                           n, "material",
                           {
                               {"density", [&](const YAML::Node& v) { mat.density = in.positive(v, "density"); }},
                               {"youngs_modulus",
                                [&](const YAML::Node& v) { mat.youngs_modulus = in.positive(v, "youngs_modulus"); }},
                               {"poisson_ratio",
                                [&](const YAML::Node& v) {
                                    mat.poisson_ratio = in.in_range(v, "poisson_ratio", 0.0, 0.5, true, false);
                                }},
                               {"mu_static", [&](const YAML::Node& v) { mat.mu_static = in.positive(v, "mu_static"); }},
                               {"mu_kinetic",
                                [&](const YAML::Node& v) { mat.mu_kinetic = in.positive(v, "mu_kinetic"); }},
                               {"volume_amplitude",
                                [&](const YAML::Node& v) {
                                    mat.volume_amplitude = in.in_range(v, "volume_amplitude", 0.0, 1.0, false, true);
                                }},
                               {"amplitude_mapping",
                                [&](const YAML::Node& v) {
                                    auto m = parse_amplitude_mapping(in.scalar<std::string>(v, "amplitude_mapping"));
                                    if (!m)
                                        in.fail(v.Mark(), "'amplitude_mapping' must be peak_volume or trough_volume");
                                    mat.amplitude_mapping = *m;
                                }},
                               {"frequency", [&](const YAML::Node& v) { mat.frequency = in.positive(v, "frequency"); }},
                           });
                   }},
                  {"solver",
                   [&](const YAML::Node& n) {
                       in.fields(
                           n, "solver",
                           {
                               {"gravity",
                                [&](const YAML::Node& v) {
                                    sol.gravity = in.in_range(v, "gravity", 0.0, 1e6, false, false);
                                }},
                               {"ground", [&](const YAML::Node& v) { sol.ground = in.scalar<bool>(v, "ground"); }},
                               {"self_collision",
                                [&](const YAML::Node& v) { sol.self_collision = in.scalar<bool>(v, "self_collision"); }},
                               {"beam_damping_ratio",
                                [&](const YAML::Node& v) {
                                    sol.beam_damping_ratio = in.in_range(v, "beam_damping_ratio", 0.0, 1e3, false, false);
                                }},
                               {"global_damping",
                                [&](const YAML::Node& v) {
                                    sol.global_damping = in.in_range(v, "global_damping", 0.0, 1.0, true, false);
                                }},
                               {"dt_fraction",
                                [&](const YAML::Node& v) {
                                    sol.dt_fraction = in.in_range(v, "dt_fraction", 0.0, 1.0, true, false);
                                }},
                               {"slip_threshold",
                                [&](const YAML::Node& v) { sol.slip_threshold = in.positive(v, "slip_threshold"); }},
                               {"collision_skin",
                                [&](const YAML::Node& v) { sol.collision_skin = in.positive(v, "collision_skin"); }},
                           });
                   }},
              });

    try
    {
        evo.validate();
    }
    catch (const std::invalid_argument& e)
    {
        const bool about_levels = std::string_view(e.what()).find("level") != std::string_view::npos;
        in.fail(about_levels && !levels_mark.is_null() ? levels_mark : root.Mark(), e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("{}: cannot open file", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

std::string config_to_yaml(const ExperimentConfig& cfg)
{
    const EvolutionConfig& evo = cfg.evolution;
    const FitnessConfig& fit = evo.fitness;
    const MaterialParams& mat = fit.eval.material;
    const SolverParams& sol = fit.eval.solver;
    std::string levels;
    for (std::size_t k = 0; k < fit.levels.size(); ++k)
        levels += (k ? ", " : "") + std::to_string(fit.levels[k]);

    std::string out;
    auto line = [&](std::string_view key, const std::string& value, int indent = 0) {
        out += std::string(static_cast<std::size_t>(indent), ' ');
        out += key;
        out += ": ";
        out += value;
        out += '\n';
    };
    line("schema_version", std::to_string(kConfigSchemaVersion));
    line("seed", std::to_string(evo.seed));
    line("trials", std::to_string(cfg.trials));
    line("population_size", std::to_string(evo.population_size));
    line("generations", std::to_string(evo.generations));
    line("condition", std::string(to_string(evo.condition)));
    line("control_mutation", std::string(to_string(evo.control_mutation)));
    line("workspace", std::to_string(fit.workspace));
    line("scale_levels", "[" + levels + "]");
    line("mode", std::string(to_string(fit.mode)));
    line("voxel_size", number(fit.voxel_size));
    line("duration", number(fit.eval.duration));
    line("voxel_budget", std::to_string(fit.eval.voxel_budget));
    out += "cppn:\n";
    line("min_hidden", std::to_string(evo.cppn.min_hidden), 2);
    line("max_hidden", std::to_string(evo.cppn.max_hidden), 2);
    line("perturb_sigma", number(evo.cppn.perturb_sigma), 2);
    line("max_mutation_attempts", std::to_string(evo.cppn.max_mutation_attempts), 2);
    out += "material:\n";
    line("density", number(mat.density), 2);
    line("youngs_modulus", number(mat.youngs_modulus), 2);
    line("poisson_ratio", number(mat.poisson_ratio), 2);
    line("mu_static", number(mat.mu_static), 2);
    line("mu_kinetic", number(mat.mu_kinetic), 2);
    line("volume_amplitude", number(mat.volume_amplitude), 2);
    line("amplitude_mapping", std::string(to_string(mat.amplitude_mapping)), 2);
    line("frequency", number(mat.frequency), 2);
    out += "solver:\n";
    line("gravity", number(sol.gravity), 2);
    line("ground", sol.ground ? "true" : "false", 2);
    line("self_collision", sol.self_collision ? "true" : "false", 2);
    line("beam_damping_ratio", number(sol.beam_damping_ratio), 2);
    line("global_damping", number(sol.global_damping), 2);
    line("dt_fraction", number(sol.dt_fraction), 2);
    line("slip_threshold", number(sol.slip_threshold), 2);
    line("collision_skin", number(sol.collision_skin), 2);
    return out;
}

} // namespace voxfract
