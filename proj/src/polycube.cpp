#include "voxfract/polycube.hpp"

#include "voxfract/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace voxfract
{

namespace
{

constexpr std::array<Coord, 6> kFaceOffsets = {{
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
}};

Coord offset(Coord c, Coord d) { return {c.x + d.x, c.y + d.y, c.z + d.z}; }

bool less_by_coord(const Voxel& a, const Voxel& b) { return a.at < b.at; }

// Index of `c` in a coordinate-sorted voxel list, or -1.
long find_sorted(std::span<const Voxel> voxels, Coord c)
{
    auto it = std::lower_bound(voxels.begin(), voxels.end(), c,
                               [](const Voxel& v, const Coord& key) { return v.at < key; });
    if (it == voxels.end() || it->at != c)
        return -1;
    return static_cast<long>(it - voxels.begin());
}

} // namespace

std::string_view to_string(Material m)
{
    switch (m)
    {
    case Material::None:
        return "none";
    case Material::PhaseA:
        return "A";
    case Material::PhaseB:
        return "B";
    }
    return "?";
}

OccupancyGrid::OccupancyGrid(int extent) : extent_(extent)
{
    if (extent < 1)
        throw std::invalid_argument("grid extent must be >= 1");
    const auto n = static_cast<std::size_t>(extent) * extent * extent;
    occupied_.assign(n, 0);
    materials_.assign(n, Material::None);
}

std::size_t OccupancyGrid::occupied_count() const
{
    return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), std::uint8_t{1}));
}

Polycube::Polycube(Unchecked, int extent, std::vector<Voxel> voxels, double voxel_size)
    : extent_(extent), voxel_size_(voxel_size), voxels_(std::move(voxels))
{
}

Polycube::Polycube(int extent, std::vector<Voxel> voxels, double voxel_size)
    : extent_(extent), voxel_size_(voxel_size), voxels_(std::move(voxels))
{
    if (extent_ < 1)
        throw InvalidPolycube("extent must be >= 1");
    if (!(voxel_size_ > 0.0) || !std::isfinite(voxel_size_))
        throw InvalidPolycube("voxel size must be positive");
    if (voxels_.empty())
        throw InvalidPolycube("polycube must contain at least one voxel");
    for (const auto& v : voxels_)
    {
        const Coord c = v.at;
        if (c.x < 0 || c.y < 0 || c.z < 0 || c.x >= extent_ || c.y >= extent_ || c.z >= extent_)
            throw InvalidPolycube("voxel outside workspace");
    }
    std::sort(voxels_.begin(), voxels_.end(), less_by_coord);
    auto dup = std::adjacent_find(voxels_.begin(), voxels_.end(),
                                  [](const Voxel& a, const Voxel& b) { return a.at == b.at; });
    if (dup != voxels_.end())
        throw InvalidPolycube("duplicate voxel coordinate");
    if (!is_face_connected(extent_, voxels_))
        throw InvalidPolycube("voxels are not face-connected");
}

bool Polycube::contains(Coord c) const { return find_sorted(voxels_, c) >= 0; }

Material Polycube::material_at(Coord c) const
{
    const long i = find_sorted(voxels_, c);
    return i < 0 ? Material::None : voxels_[static_cast<std::size_t>(i)].material;
}

bool Polycube::has_material_labels() const
{
    return std::all_of(voxels_.begin(), voxels_.end(), [](const Voxel& v) { return v.material != Material::None; });
}

OccupancyGrid Polycube::to_grid() const
{
    OccupancyGrid g(extent_);
    for (const auto& v : voxels_)
        g.set(v.at, v.material);
    return g;
}

Polycube Polycube::relabeled(Material m) const
{
    auto copy = voxels_;
    for (auto& v : copy)
        v.material = m;
    return Polycube(Unchecked{}, extent_, std::move(copy), voxel_size_);
}

bool is_face_connected(int /*extent*/, std::span<const Voxel> voxels)
{
    if (voxels.empty())
        return false;
    std::vector<Voxel> sorted;
    std::span<const Voxel> view = voxels;
    if (!std::is_sorted(voxels.begin(), voxels.end(), less_by_coord))
    {
        sorted.assign(voxels.begin(), voxels.end());
        std::sort(sorted.begin(), sorted.end(), less_by_coord);
        view = sorted;
    }
    std::vector<std::uint8_t> seen(view.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty())
    {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (const auto& d : kFaceOffsets)
        {
            const long j = find_sorted(view, offset(view[i].at, d));
            if (j >= 0 && !seen[static_cast<std::size_t>(j)])
            {
                seen[static_cast<std::size_t>(j)] = 1;
                ++reached;
                stack.push_back(static_cast<std::size_t>(j));
            }
        }
    }
    return reached == view.size();
}

Polycube largest_connected_component(const OccupancyGrid& grid, double voxel_size)
{
    const int m = grid.extent();
    std::vector<int> label(static_cast<std::size_t>(m) * m * m, -1);
    std::vector<Coord> best;
    std::vector<Coord> current;
    std::vector<Coord> stack;
    int next_label = 0;

    // Cells are scanned in lexicographic (x, y, z) order, so components are
    // discovered in order of their minimum coordinate; strict '>' keeps the
    // earliest on ties.
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
            {
                const Coord start{x, y, z};
                if (!grid.occupied(start) || label[grid.index(start)] >= 0)
                    continue;
                current.clear();
                stack.assign(1, start);
                label[grid.index(start)] = next_label;
                while (!stack.empty())
                {
                    const Coord c = stack.back();
                    stack.pop_back();
                    current.push_back(c);
                    for (const auto& d : kFaceOffsets)
                    {
                        const Coord n = offset(c, d);
                        if (grid.contains(n) && grid.occupied(n) && label[grid.index(n)] < 0)
                        {
                            label[grid.index(n)] = next_label;
                            stack.push_back(n);
                        }
                    }
                }
                ++next_label;
                if (current.size() > best.size())
                    best.swap(current);
            }

    if (best.empty())
        throw EmptyPhenotype();

    std::vector<Voxel> voxels;
    voxels.reserve(best.size());
    for (const Coord& c : best)
        voxels.push_back({c, grid.material(c)});
    return Polycube(m, std::move(voxels), voxel_size);
}

std::size_t integer_power(std::size_t base, int exponent)
{
    std::size_t r = 1;
    for (int i = 0; i < exponent; ++i)
        r *= base;
    return r;
}

Polycube compose(const Polycube& host, const Polycube& unit, std::size_t voxel_budget)
{
    const std::size_t total = host.size() * unit.size();
    if (total > voxel_budget)
        throw BudgetExceeded("composed structure would have " + std::to_string(total) + " voxels, budget is " +
                             std::to_string(voxel_budget));

    const int step = unit.extent();
    std::vector<Voxel> voxels;
    voxels.reserve(total);
    for (const auto& h : host.voxels())
        for (const auto& u : unit.voxels())
            voxels.push_back({{step * h.at.x + u.at.x, step * h.at.y + u.at.y, step * h.at.z + u.at.z}, u.material});
    std::sort(voxels.begin(), voxels.end(), less_by_coord);

    const int extent = host.extent() * unit.extent();
    if (!is_face_connected(extent, voxels))
        throw DisconnectedComposition("composed structure is not face-connected");
    return Polycube(Polycube::Unchecked{}, extent, std::move(voxels), unit.voxel_size());
}

Polycube fractalize(const Polycube& basal, int level, std::size_t voxel_budget)
{
    if (level < 0)
        throw std::invalid_argument("fractal level must be >= 0");
    Polycube current = basal;
    for (int k = 1; k <= level; ++k)
        current = compose(current, basal, voxel_budget);
    return current;
}

double hausdorff_dimension(std::size_t voxel_count, int workspace_extent)
{
    if (voxel_count < 1)
        throw std::invalid_argument("voxel count must be >= 1");
    if (workspace_extent < 2)
        throw std::invalid_argument("workspace extent must be >= 2");
    return std::log(static_cast<double>(voxel_count)) / std::log(static_cast<double>(workspace_extent));
}

double body_length(int workspace_extent, int level, double voxel_size)
{
    if (workspace_extent < 1 || level < 0)
        throw std::invalid_argument("body_length needs extent >= 1 and level >= 0");
    return static_cast<double>(integer_power(static_cast<std::size_t>(workspace_extent), level + 1)) * voxel_size;
}

double body_length(const Polycube& basal, int level)
{
    return body_length(basal.extent(), level, basal.voxel_size());
}

std::size_t count_face_adjacent_pairs(const Polycube& p)
{
    std::size_t pairs = 0;
    const auto voxels = p.voxels();
    for (const auto& v : voxels)
        for (int axis = 0; axis < 3; ++axis)
        {
            Coord n = v.at;
            (axis == 0 ? n.x : axis == 1 ? n.y : n.z) += 1;
            if (find_sorted(voxels, n) >= 0)
                ++pairs;
        }
    return pairs;
}

Polycube menger_sponge(Material material)
{
    std::vector<Voxel> voxels;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y)
            for (int z = 0; z < 3; ++z)
            {
                const int centered = (x == 1) + (y == 1) + (z == 1);
                if (centered >= 2)
                    continue;
                voxels.push_back({{x, y, z}, material});
            }
    return Polycube(3, std::move(voxels));
}

} // namespace voxfract
