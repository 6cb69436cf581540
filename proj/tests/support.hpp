#pragma once

#include "voxfract/harness/config.hpp"
#include "voxfract/polycube.hpp"
#include "voxfract/rng.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace testing_support
{

using namespace voxfract;

inline OccupancyGrid random_grid(Rng& rng, int m, double fill)
{
    OccupancyGrid g(m);
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
                if (rng.uniform() < fill)
                    g.set({x, y, z}, rng.uniform() < 0.5 ? Material::PhaseA : Material::PhaseB);
    return g;
}

inline Polycube box(int nx, int ny, int nz, Material m = Material::PhaseA)
{
    std::vector<Voxel> v;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z)
                v.push_back({{x, y, z}, m});
    return Polycube(std::max({nx, ny, nz}), std::move(v));
}

/// Asymmetric 3x3x3 basal design with both phases: two floor arms of
/// unequal material and a corner post. Every arm spans the workspace, so the
/// copies touch at every fractal level.
inline Polycube l_shape()
{
    std::vector<Voxel> v = {{{0, 0, 0}, Material::PhaseA}, {{1, 0, 0}, Material::PhaseA},
                            {{2, 0, 0}, Material::PhaseB}, {{0, 1, 0}, Material::PhaseB},
                            {{0, 2, 0}, Material::PhaseB}, {{0, 0, 1}, Material::PhaseA},
                            {{0, 0, 2}, Material::PhaseB}};
    return Polycube(3, std::move(v));
}

/// Minimal valid config text for quick runs.
inline std::string small_config(int population, int generations, const std::string& levels, std::uint64_t seed = 1,
                                const std::string& extra = "")
{
    return "schema_version: 1\nseed: " + std::to_string(seed) + "\npopulation_size: " + std::to_string(population) +
           "\ngenerations: " + std::to_string(generations) + "\nscale_levels: " + levels + "\n" + extra;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("voxfract_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing_support
