#pragma once

#include "voxfract/physics/simulation.hpp"
#include "voxfract/polycube.hpp"

#include <cstddef>
#include <ostream>

namespace voxfract
{

/// Writes sampled frames of a run: the trajectory CSV
/// (t, com_x, com_y, com_z, kinetic_energy, elastic_energy) and, optionally,
/// a polygon-soup mesh with one quad per exposed voxel face.
class TrajectoryWriter
{
  public:
    TrajectoryWriter(std::ostream* csv, std::ostream* mesh, double interval);

    void record(const SimState& s);
    void finish(const SimState& s);

  private:
    void write_frame(const SimState& s);

    std::ostream* csv_;
    std::ostream* mesh_;
    double interval_;
    double next_ = 0.0;
    std::size_t frame_ = 0;
    double last_time_ = -1.0;
};

struct EvalSettings
{
    MaterialParams material;
    SolverParams solver;
    double duration = 5.0; // s
    std::size_t voxel_budget = 20'000;

    friend bool operator==(const EvalSettings&, const EvalSettings&) = default;
};

struct Displacement
{
    double body_lengths = 0.0; // net horizontal center-of-mass travel / body length
    double meters = 0.0;
    double body_length = 0.0;
    bool diverged = false;
    std::size_t steps = 0;
    std::size_t voxels = 0;
};

/// Simulates `structure` for settings.duration seconds. A diverged run
/// reports zero displacement with `diverged` set.
Displacement simulate_displacement(const Polycube& structure, double body_length, ActuationMode mode,
                                   const EvalSettings& settings, TrajectoryWriter* trajectory = nullptr);

/// Fractalizes `basal` to `level` and measures its displacement in body
/// lengths of that level. Throws DisconnectedComposition or BudgetExceeded
/// if the fractal cannot be built.
Displacement evaluate_displacement(const Polycube& basal, int level, ActuationMode mode,
                                   const EvalSettings& settings, TrajectoryWriter* trajectory = nullptr);

} // namespace voxfract
