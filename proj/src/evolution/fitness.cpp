#include "voxfract/evolution/fitness.hpp"

#include "voxfract/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace voxfract
{

namespace
{

constexpr std::array<std::pair<FitnessFlag, std::string_view>, 4> kFlagNames = {{
    {kFlagEmpty, "empty"},
    {kFlagDisconnected, "disconnected"},
    {kFlagDiverged, "diverged"},
    {kFlagBudget, "budget"},
}};

void append_key(std::string& key, const Polycube& p)
{
    key += std::to_string(p.extent());
    key += ':';
    for (const auto& v : p.voxels())
    {
        key += static_cast<char>('a' + v.at.x);
        key += static_cast<char>('a' + v.at.y);
        key += static_cast<char>('a' + v.at.z);
        key += static_cast<char>('0' + static_cast<int>(v.material));
    }
    key += ';';
}

std::uint32_t flag_for_build_error(const std::exception_ptr& e)
{
    try
    {
        std::rethrow_exception(e);
    }
    catch (const DisconnectedComposition&)
    {
        return kFlagDisconnected;
    }
    catch (const BudgetExceeded&)
    {
        return kFlagBudget;
    }
}

void set_basal(Phenotype& p, const Polycube& basal, int workspace)
{
    p.c = basal.size();
    p.H = hausdorff_dimension(basal.size(), workspace);
}

} // namespace

std::string flags_to_string(std::uint32_t flags)
{
    std::string out;
    for (const auto& [bit, name] : kFlagNames)
        if (flags & bit)
        {
            if (!out.empty())
                out += '|';
            out += name;
        }
    return out;
}

std::uint32_t flags_from_string(const std::string& s)
{
    std::uint32_t flags = kFlagNone;
    std::size_t start = 0;
    while (start < s.size())
    {
        const std::size_t end = std::min(s.find('|', start), s.size());
        const std::string_view token(s.data() + start, end - start);
        auto it = std::find_if(kFlagNames.begin(), kFlagNames.end(), [&](const auto& f) { return f.second == token; });
        if (it == kFlagNames.end())
            throw std::invalid_argument("unknown fitness flag '" + std::string(token) + "'");
        flags |= it->first;
        start = end + 1;
    }
    return flags;
}

std::string_view to_string(Condition c)
{
    return c == Condition::Fractal ? "fractal" : "control";
}

std::optional<Condition> parse_condition(std::string_view s)
{
    if (s == "fractal")
        return Condition::Fractal;
    if (s == "control")
        return Condition::Control;
    return std::nullopt;
}

void FitnessConfig::validate(Condition condition) const
{
    if (workspace < 2)
        throw std::invalid_argument("workspace must be >= 2");
    if (levels.empty())
        throw std::invalid_argument("scale_levels must not be empty");
    if (!std::is_sorted(levels.begin(), levels.end()) ||
        std::adjacent_find(levels.begin(), levels.end()) != levels.end())
        throw std::invalid_argument("scale_levels must be strictly increasing");
    if (levels.front() < 0)
        throw std::invalid_argument("scale_levels must be >= 0");
    if (condition == Condition::Control && levels.back() > 2)
        throw std::invalid_argument("the control condition defines levels 0, 1 and 2 only");
    if (!(voxel_size > 0.0))
        throw std::invalid_argument("voxel_size must be positive");
    if (!(eval.duration > 0.0))
        throw std::invalid_argument("duration must be positive");
    eval.material.validate();
    eval.solver.validate();
}

Phenotype fractal_phenotype(const CppnGenome& g, const FitnessConfig& cfg)
{
    Phenotype p;
    p.key = "F";
    std::optional<Polycube> decoded;
    try
    {
        decoded = decode(g, cfg.workspace, cfg.voxel_size);
    }
    catch (const EmptyPhenotype&)
    {
        p.flags = kFlagEmpty;
        return p;
    }
    return design_phenotype(*decoded, cfg);
}

Phenotype design_phenotype(const Polycube& basal, const FitnessConfig& cfg)
{
    Phenotype p;
    p.key = "F";
    append_key(p.key, basal);
    set_basal(p, basal, cfg.workspace);
    try
    {
        for (int level : cfg.levels)
            p.structures.push_back(fractalize(basal, level, cfg.eval.voxel_budget));
    }
    catch (const std::runtime_error&)
    {
        p.flags = flag_for_build_error(std::current_exception());
        p.structures.clear();
    }
    return p;
}

Phenotype control_phenotype(const std::array<CppnGenome, 3>& g, const FitnessConfig& cfg)
{
    Phenotype p;
    p.key = "C";
    std::vector<Polycube> parts;
    try
    {
        for (const auto& genome : g)
        {
            parts.push_back(decode(genome, cfg.workspace, cfg.voxel_size));
            append_key(p.key, parts.back());
        }
    }
    catch (const EmptyPhenotype&)
    {
        p.flags = kFlagEmpty;
        if (!parts.empty())
            set_basal(p, parts.front(), cfg.workspace);
        return p;
    }
    set_basal(p, parts[0], cfg.workspace);
    try
    {
        // Level k places copies of level k - 1 at the cells chosen by genome k.
        std::vector<Polycube> by_level = {parts[0]};
        for (int k = 1; k <= cfg.levels.back(); ++k)
            by_level.push_back(compose(parts[static_cast<std::size_t>(k)], by_level.back(), cfg.eval.voxel_budget));
        for (int level : cfg.levels)
            p.structures.push_back(by_level[static_cast<std::size_t>(level)]);
    }
    catch (const std::runtime_error&)
    {
        p.flags = flag_for_build_error(std::current_exception());
        p.structures.clear();
    }
    return p;
}

FitnessRecord evaluate_phenotype(const Phenotype& p, const FitnessConfig& cfg,
                                 std::span<TrajectoryWriter* const> trajectories)
{
    FitnessRecord r;
    r.c = p.c;
    r.H = p.H;
    r.flags = p.flags;
    r.d.assign(cfg.levels.size(), 0.0);
    if (p.flags == kFlagNone)
    {
        for (std::size_t k = 0; k < cfg.levels.size(); ++k)
        {
            const Displacement d =
                simulate_displacement(p.structures[k], body_length(cfg.workspace, cfg.levels[k], cfg.voxel_size),
                                      cfg.mode, cfg.eval, k < trajectories.size() ? trajectories[k] : nullptr);
            if (d.diverged)
            {
                r.flags |= kFlagDiverged;
                r.d[k] = 0.0;
            }
            else
                r.d[k] = d.body_lengths;
        }
    }
    r.F = *std::min_element(r.d.begin(), r.d.end());
    return r;
}

FitnessRecord fitness(const CppnGenome& g, const FitnessConfig& cfg)
{
    return evaluate_phenotype(fractal_phenotype(g, cfg), cfg);
}

FitnessRecord fitness_control(const std::array<CppnGenome, 3>& g, const FitnessConfig& cfg)
{
    return evaluate_phenotype(control_phenotype(g, cfg), cfg);
}

} // namespace voxfract
