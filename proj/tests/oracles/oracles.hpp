#pragma once

// Slow, direct implementations used only to cross-check the library.

#include "voxfract/cppn.hpp"
#include "voxfract/polycube.hpp"
#include "voxfract/vec.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace oracle
{

using voxfract::Coord;
using voxfract::Material;
using voxfract::OccupancyGrid;
using voxfract::Voxel;

/// Largest 6-connected component by breadth-first flood fill; ties go to the
/// component with the lexicographically smallest minimum cell. Sorted voxels.
std::vector<Voxel> flood_fill_lcc(const OccupancyGrid& grid);

/// Level-k fractal by base-m digit arithmetic: a cell is occupied when every
/// digit triple names a basal voxel, and takes the label of the lowest digit.
std::vector<Voxel> fractal_by_digits(const voxfract::Polycube& basal, int level);

/// Control aggregate by digit arithmetic: the level-2 digit must name a cell
/// of `top`, the level-1 digit a cell of `middle`, the lowest digit a voxel of
/// `basal` (whose label the cell takes). Level 1 uses only `middle` and `basal`.
std::vector<Voxel> control_by_digits(const voxfract::Polycube& basal, const voxfract::Polycube& middle,
                                     const voxfract::Polycube* top);

/// Evaluates a CPPN by recursion over incoming edges, straight from the genome.
voxfract::CppnOutput interpret_cppn(const voxfract::CppnGenome& g, double x, double y, double z);

/// Every pair i < j with |p_i - p_j| < cutoff.
std::vector<std::pair<int, int>> close_pairs(std::span<const voxfract::Vec3> points, double cutoff);

/// Two-sided exact rank-sum p-value by enumerating every split of the pooled
/// sample and counting pairs (U statistic) for each.
double rank_sum_p_by_enumeration(std::span<const double> a, std::span<const double> b);

/// Face-adjacent voxel pairs by testing every pair.
std::size_t adjacent_pairs(std::span<const Voxel> voxels);

/// Central-difference gradient of f at x.
std::vector<double> numeric_gradient(const std::function<double(const std::vector<double>&)>& f,
                                     std::vector<double> x, double h);

} // namespace oracle
