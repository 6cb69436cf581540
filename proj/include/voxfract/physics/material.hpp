#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace voxfract
{

enum class ActuationMode
{
    AntiPhase,     // PhaseA at phase 0, PhaseB at pi
    PhaseWave,     // one full 2*pi sweep from anterior (+x) to posterior
    SingleBladder, // phase 0 everywhere
};

std::string_view to_string(ActuationMode m);
std::optional<ActuationMode> parse_actuation_mode(std::string_view s);

/// How the +/- volume amplitude maps onto beam rest lengths.
enum class AmplitudeMapping
{
    PeakVolume,      // (1 + a)^3 = 1 + volume amplitude
    TroughVolume,    // (1 - a)^3 = 1 - volume amplitude
};

std::string_view to_string(AmplitudeMapping m);
std::optional<AmplitudeMapping> parse_amplitude_mapping(std::string_view s);

struct MaterialParams
{
    double density = 10.0;          // kg/m^3
    double youngs_modulus = 1e4;    // Pa
    double poisson_ratio = 0.5;
    double mu_static = 1.0;
    double mu_kinetic = 0.5;
    double volume_amplitude = 0.5;  // +/- fraction of resting volume
    AmplitudeMapping amplitude_mapping = AmplitudeMapping::PeakVolume;
    double frequency = 5.0;         // Hz

    double shear_modulus() const { return youngs_modulus / (2.0 * (1.0 + poisson_ratio)); }

    /// Linear rest-length amplitude a, so L(t) = L0 * (1 + a sin(...)).
    double linear_amplitude() const
    {
        if (amplitude_mapping == AmplitudeMapping::PeakVolume)
            return std::cbrt(1.0 + volume_amplitude) - 1.0;
        return 1.0 - std::cbrt(1.0 - volume_amplitude);
    }

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const MaterialParams&, const MaterialParams&) = default;
};

/// Numerical settings of the integrator and contact model.
struct SolverParams
{
    double gravity = 9.81;            // m/s^2 along -z
    bool ground = true;               // ground plane at z = 0
    bool self_collision = true;
    double beam_damping_ratio = 1.0;
    double global_damping = 0.999;    // per-step velocity multiplier
    double dt_fraction = 0.1;         // dt = dt_fraction * sqrt(m_min / k_max)
    double slip_threshold = 1e-6;     // m/s, static/kinetic friction switch
    double collision_skin = 0.25;     // broad-phase margin, in voxel sizes

    void validate() const;

    friend bool operator==(const SolverParams&, const SolverParams&) = default;
};

} // namespace voxfract
