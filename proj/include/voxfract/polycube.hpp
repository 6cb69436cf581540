#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace voxfract
{

enum class Material : std::uint8_t
{
    None = 0,   // empty cell, or an unlabeled voxel in non-antiphase modes
    PhaseA = 1,
    PhaseB = 2,
};

std::string_view to_string(Material m);

struct Coord
{
    int x = 0;
    int y = 0;
    int z = 0;

    friend constexpr auto operator<=>(const Coord&, const Coord&) = default;
};

struct Voxel
{
    Coord at;
    Material material = Material::None;

    friend constexpr bool operator==(const Voxel&, const Voxel&) = default;
};

/// Dense cubic grid of cells. Material::None marks an empty cell; presence of
/// any other value (or `occupied`) marks material.
class OccupancyGrid
{
  public:
    explicit OccupancyGrid(int extent);

    int extent() const { return extent_; }
    std::size_t index(Coord c) const
    {
        return (static_cast<std::size_t>(c.x) * extent_ + c.y) * extent_ + c.z;
    }
    bool contains(Coord c) const
    {
        return c.x >= 0 && c.y >= 0 && c.z >= 0 && c.x < extent_ && c.y < extent_ && c.z < extent_;
    }

    bool occupied(Coord c) const { return occupied_[index(c)] != 0; }
    Material material(Coord c) const { return materials_[index(c)]; }
    void set(Coord c, Material m = Material::None)
    {
        occupied_[index(c)] = 1;
        materials_[index(c)] = m;
    }
    void clear(Coord c)
    {
        occupied_[index(c)] = 0;
        materials_[index(c)] = Material::None;
    }

    std::size_t occupied_count() const;

  private:
    int extent_;
    std::vector<std::uint8_t> occupied_;
    std::vector<Material> materials_;
};

/// Face-connected set of unit voxels inside an extent^3 workspace.
///
/// Voxels are kept sorted by coordinate. Construction validates every
/// invariant (non-empty, in bounds, no duplicates, single 6-connected
/// component) and throws InvalidPolycube otherwise.
class Polycube
{
  public:
    static constexpr double kDefaultVoxelSize = 0.01;

    Polycube(int extent, std::vector<Voxel> voxels, double voxel_size = kDefaultVoxelSize);

    int extent() const { return extent_; }
    double voxel_size() const { return voxel_size_; }
    std::size_t size() const { return voxels_.size(); }
    std::span<const Voxel> voxels() const { return voxels_; }

    bool contains(Coord c) const;
    Material material_at(Coord c) const;
    bool has_material_labels() const;

    OccupancyGrid to_grid() const;

    /// Same voxel set with every label replaced.
    Polycube relabeled(Material m) const;

    friend bool operator==(const Polycube& a, const Polycube& b)
    {
        return a.extent_ == b.extent_ && a.voxel_size_ == b.voxel_size_ && a.voxels_ == b.voxels_;
    }

  private:
    struct Unchecked
    {
    };
    Polycube(Unchecked, int extent, std::vector<Voxel> voxels, double voxel_size);
    friend Polycube compose(const Polycube&, const Polycube&, std::size_t);

    int extent_;
    double voxel_size_;
    std::vector<Voxel> voxels_;
};

/// True when the occupied voxels form one 6-connected component.
bool is_face_connected(int extent, std::span<const Voxel> voxels);

/// Largest 6-connected component of the occupied cells.
///
/// Equal-size components are resolved in favor of the one whose minimum
/// coordinate is lexicographically smallest. Throws EmptyPhenotype if no cell
/// is occupied.
Polycube largest_connected_component(const OccupancyGrid& grid, double voxel_size = Polycube::kDefaultVoxelSize);

/// Replaces every voxel of `host` with a copy of `unit` translated by
/// unit.extent() * host coordinate. Copies keep the unit's labels.
///
/// Throws BudgetExceeded if the result would exceed `voxel_budget` voxels and
/// DisconnectedComposition if the copies do not form one connected body.
Polycube compose(const Polycube& host, const Polycube& unit, std::size_t voxel_budget);

inline constexpr std::size_t kDefaultVoxelBudget = 1'000'000;

/// Level-k fractal of a basal design, built iteratively: each level replaces
/// every voxel of the previous level with a copy of the basal design.
Polycube fractalize(const Polycube& basal, int level, std::size_t voxel_budget = kDefaultVoxelBudget);

/// log(c) / log(m). Requires c >= 1 and m >= 2.
double hausdorff_dimension(std::size_t voxel_count, int workspace_extent);

/// Workspace edge at fractal level k: m^(k+1) * voxel_size.
double body_length(int workspace_extent, int level, double voxel_size = Polycube::kDefaultVoxelSize);
double body_length(const Polycube& basal, int level);

std::size_t integer_power(std::size_t base, int exponent);

/// Number of face-adjacent voxel pairs.
std::size_t count_face_adjacent_pairs(const Polycube& p);

/// Menger sponge of edge 3: the 3^3 cube without the six face centers and the body center.
Polycube menger_sponge(Material material = Material::None);

} // namespace voxfract
