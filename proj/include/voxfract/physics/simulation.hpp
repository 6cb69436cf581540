#pragma once

#include "voxfract/physics/beam.hpp"
#include "voxfract/physics/material.hpp"
#include "voxfract/polycube.hpp"
#include "voxfract/vec.hpp"

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace voxfract
{

struct BeamSpec
{
    int i = 0; // lower-coordinate end
    int j = 0; // i + unit step along `axis`
    int axis = 0;
    double rest_length = 0.0;
    BeamStiffness stiffness;
    double linear_damping = 0.0;  // N s/m on relative velocity
    double angular_damping = 0.0; // N m s on relative angular velocity
};

/// Exposed voxel face, for surface meshes.
struct ExposedFace
{
    int mass = 0;
    int axis = 0;
    int sign = 1;
};

/// Immutable description of a voxel lattice; shared between copies of a state.
struct Lattice
{
    MaterialParams material;
    SolverParams solver;
    ActuationMode mode = ActuationMode::AntiPhase;

    double voxel_size = 0.0;
    double mass = 0.0;    // per voxel
    double inertia = 0.0; // per voxel, isotropic
    double linear_amplitude = 0.0;
    double contact_stiffness = 0.0;
    double contact_damping = 0.0;

    std::vector<Coord> coords;
    std::vector<double> phase; // radians, per voxel
    std::vector<double> distinct_phases;
    std::vector<int> phase_slot; // per voxel, index into distinct_phases
    std::vector<BeamSpec> beams;          // grouped by axis
    std::array<std::size_t, 4> axis_begin{}; // beams of axis a: [axis_begin[a], axis_begin[a + 1])
    std::vector<std::array<int, 6>> neighbors; // bonded masses, -1 padded
    std::vector<int> surface;                  // masses with fewer than 6 bonds
    std::vector<ExposedFace> exposed_faces;

    std::size_t size() const { return coords.size(); }
    bool bonded(int a, int b) const;
};

/// Full dynamic state of a simulated voxel lattice.
struct SimState
{
    std::shared_ptr<const Lattice> lattice;

    std::vector<Vec3> position;
    std::vector<Vec3> velocity;
    std::vector<Quat> orientation;
    std::vector<Vec3> angular_velocity;
    std::vector<Vec3> external_force; // optional per-mass load, empty means none
    double time = 0.0;
    std::uint64_t steps = 0;

    // Candidate pairs from the last broad-phase pass and the surface
    // positions they were computed at.
    std::vector<std::pair<int, int>> collision_candidates;
    std::vector<Vec3> broad_phase_anchor;
    std::uint64_t broad_phase_passes = 0;

    std::size_t size() const { return position.size(); }
};

/// One point mass per voxel at its cell center, one beam per shared face.
/// The lowest masses rest on the ground plane (z = voxel_size / 2).
SimState build_sim(const Polycube& design, ActuationMode mode, const MaterialParams& material = {},
                   const SolverParams& solver = {});

/// Phase offsets the mode assigns to each voxel of `design`.
std::vector<double> assign_phases(const Polycube& design, ActuationMode mode);

/// Rest-length scale of one voxel: 1 + a sin(2 pi f t + phase).
double actuation_scale(double t, double phase, const MaterialParams& params);

/// L0 * actuation_scale(t, phase).
double actuation_rest_length(double rest_length, double t, double phase, const MaterialParams& params);

/// Actuated rest length of a beam: L0 times the mean of its two voxels' scales.
double beam_rest_length(const SimState& s, const BeamSpec& beam, double t);

/// dt_fraction * sqrt(m_min / k_max).
double stable_timestep(const Lattice& lattice);

/// Beam forces and torques only (elastic plus damping), written into the spans.
void accumulate_beam_loads(const SimState& s, std::span<Vec3> forces, std::span<Vec3> torques);

/// Ground normal and Coulomb friction forces for each mass, given the other
/// forces acting on it this step.
std::vector<Vec3> ground_contact_and_friction(const SimState& s, std::span<const Vec3> other_forces, double dt);

/// Non-bonded surface-mass pairs closer than one voxel, found with a BVH.
std::vector<std::pair<int, int>> detect_collisions(const SimState& s);

/// Same contract as detect_collisions, by testing every surface pair.
std::vector<std::pair<int, int>> detect_collisions_brute_force(const SimState& s);

/// Advances by dt with semi-implicit Euler. Throws SimulationDiverged when
/// any state variable becomes non-finite.
void step(SimState& s, double dt);

Vec3 center_of_mass(const SimState& s);
double kinetic_energy(const SimState& s);
double elastic_energy(const SimState& s);
double gravitational_energy(const SimState& s);
double ground_contact_energy(const SimState& s);

} // namespace voxfract
