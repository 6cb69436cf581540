#include "voxfract/physics/simulation.hpp"

#include "voxfract/errors.hpp"
#include "voxfract/physics/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace voxfract
{

namespace
{

// Any mass faster than this is treated as a numerical blow-up.
constexpr double kMaxSpeed = 100.0; // m/s

struct Workspace
{
    std::vector<double> slot_scale;
    std::vector<Frame> frame;
    std::vector<Vec3> force;
    std::vector<Vec3> torque;
};

Workspace& workspace()
{
    thread_local Workspace ws;
    return ws;
}

long find_coord(std::span<const Voxel> voxels, Coord c)
{
    auto it = std::lower_bound(voxels.begin(), voxels.end(), c,
                               [](const Voxel& v, const Coord& key) { return v.at < key; });
    if (it == voxels.end() || it->at != c)
        return -1;
    return static_cast<long>(it - voxels.begin());
}

// Actuation scale of every distinct phase at time t.
void phase_scales(const Lattice& lat, double t, std::vector<double>& out)
{
    out.resize(lat.distinct_phases.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = lat.linear_amplitude == 0.0 ? 1.0 : actuation_scale(t, lat.distinct_phases[k], lat.material);
}

template <int Axis>
void add_axis_beam_loads(const SimState& s, std::span<const BeamSpec> beams, std::span<const double> scale,
                         std::span<const Frame> frame, std::span<Vec3> forces, std::span<Vec3> torques)
{
    const Lattice& lat = *s.lattice;
    for (const BeamSpec& b : beams)
    {
        const auto i = static_cast<std::size_t>(b.i);
        const auto j = static_cast<std::size_t>(b.j);
        const double rest = b.rest_length * 0.5 *
                            (scale[static_cast<std::size_t>(lat.phase_slot[i])] +
                             scale[static_cast<std::size_t>(lat.phase_slot[j])]);
        const BeamLoad load =
            detail::beam_load_axis<Axis>(b.stiffness, rest, s.position[i], frame[i], s.position[j], frame[j]);
        const Vec3 damp = (s.velocity[j] - s.velocity[i]) * b.linear_damping;
        const Vec3 spin = (s.angular_velocity[j] - s.angular_velocity[i]) * b.angular_damping;
        const Vec3 fi = load.force_i + damp;
        forces[i] += fi;
        forces[j] -= fi;
        torques[i] += load.torque_i + spin;
        torques[j] += load.torque_j - spin;
    }
}

// Beams are stored grouped by axis (see build_sim); each group runs with a
// compile-time axis.
void add_beam_loads(const SimState& s, std::span<const Frame> frame, std::span<Vec3> forces,
                    std::span<Vec3> torques)
{
    const Lattice& lat = *s.lattice;
    auto& scale = workspace().slot_scale;
    phase_scales(lat, s.time, scale);
    const std::span<const BeamSpec> all(lat.beams);
    const auto group = [&](std::size_t a) {
        return all.subspan(lat.axis_begin[a], lat.axis_begin[a + 1] - lat.axis_begin[a]);
    };
    add_axis_beam_loads<0>(s, group(0), scale, frame, forces, torques);
    add_axis_beam_loads<1>(s, group(1), scale, frame, forces, torques);
    add_axis_beam_loads<2>(s, group(2), scale, frame, forces, torques);
}

std::vector<std::pair<int, int>> surface_pairs_within(const SimState& s, double cutoff)
{
    const Lattice& lat = *s.lattice;
    std::vector<Vec3> points;
    points.reserve(lat.surface.size());
    for (int m : lat.surface)
        points.push_back(s.position[static_cast<std::size_t>(m)]);
    std::vector<std::pair<int, int>> out;
    for (const auto& [a, b] : find_close_pairs(points, cutoff))
    {
        const int i = lat.surface[static_cast<std::size_t>(a)];
        const int j = lat.surface[static_cast<std::size_t>(b)];
        if (!lat.bonded(i, j))
            out.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(out.begin(), out.end());
    return out;
}

void refresh_broad_phase(SimState& s)
{
    const Lattice& lat = *s.lattice;
    const double skin = lat.solver.collision_skin * lat.voxel_size;
    bool stale = s.broad_phase_anchor.size() != lat.surface.size();
    if (!stale)
    {
        const double limit = 0.25 * skin * skin; // (skin / 2)^2
        for (std::size_t k = 0; k < lat.surface.size(); ++k)
            if (norm_squared(s.position[static_cast<std::size_t>(lat.surface[k])] - s.broad_phase_anchor[k]) > limit)
            {
                stale = true;
                break;
            }
    }
    if (!stale)
        return;
    s.collision_candidates = surface_pairs_within(s, lat.voxel_size + skin);
    s.broad_phase_anchor.resize(lat.surface.size());
    for (std::size_t k = 0; k < lat.surface.size(); ++k)
        s.broad_phase_anchor[k] = s.position[static_cast<std::size_t>(lat.surface[k])];
    ++s.broad_phase_passes;
}

void add_collision_forces(const SimState& s, double dt, std::span<Vec3> forces)
{
    const Lattice& lat = *s.lattice;
    const double reach_sq = lat.voxel_size * lat.voxel_size;
    for (const auto& [a, b] : s.collision_candidates)
    {
        const auto i = static_cast<std::size_t>(a);
        const auto j = static_cast<std::size_t>(b);
        const Vec3 d = s.position[j] - s.position[i];
        const double dist_sq = norm_squared(d);
        if (dist_sq >= reach_sq || dist_sq == 0.0)
            continue;
        const double dist = std::sqrt(dist_sq);
        const Vec3 n = d / dist;
        const double normal = lat.contact_stiffness * (lat.voxel_size - dist);
        Vec3 fj = n * normal;

        const Vec3 rel = s.velocity[j] - s.velocity[i];
        const Vec3 slide = rel - n * dot(n, rel);
        const double speed = norm(slide);
        if (speed > lat.solver.slip_threshold)
        {
            // Kinetic friction, limited so it cannot reverse the sliding within one step.
            const double magnitude = std::min(lat.material.mu_kinetic * normal, 0.5 * lat.mass * speed / dt);
            fj -= slide * (magnitude / speed);
        }
        forces[j] += fj;
        forces[i] -= fj;
    }
}

} // namespace

std::string_view to_string(ActuationMode m)
{
    switch (m)
    {
    case ActuationMode::AntiPhase:
        return "antiphase";
    case ActuationMode::PhaseWave:
        return "wave";
    case ActuationMode::SingleBladder:
        return "bladder";
    }
    return "?";
}

std::optional<ActuationMode> parse_actuation_mode(std::string_view s)
{
    for (auto m : {ActuationMode::AntiPhase, ActuationMode::PhaseWave, ActuationMode::SingleBladder})
        if (to_string(m) == s)
            return m;
    return std::nullopt;
}

std::string_view to_string(AmplitudeMapping m)
{
    return m == AmplitudeMapping::PeakVolume ? "peak_volume" : "trough_volume";
}

std::optional<AmplitudeMapping> parse_amplitude_mapping(std::string_view s)
{
    if (s == "peak_volume")
        return AmplitudeMapping::PeakVolume;
    if (s == "trough_volume")
        return AmplitudeMapping::TroughVolume;
    return std::nullopt;
}

void MaterialParams::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(density, "density");
    positive(youngs_modulus, "youngs_modulus");
    positive(mu_static, "mu_static");
    positive(mu_kinetic, "mu_kinetic");
    positive(frequency, "frequency");
    if (!(poisson_ratio > 0.0 && poisson_ratio <= 0.5))
        throw std::invalid_argument("poisson_ratio must be in (0, 0.5]");
    if (!(volume_amplitude >= 0.0 && volume_amplitude < 1.0))
        throw std::invalid_argument("volume_amplitude must be in [0, 1)");
}

void SolverParams::validate() const
{
    if (!(gravity >= 0.0) || !std::isfinite(gravity))
        throw std::invalid_argument("gravity must be non-negative");
    if (!(beam_damping_ratio >= 0.0))
        throw std::invalid_argument("beam_damping_ratio must be non-negative");
    if (!(global_damping > 0.0 && global_damping <= 1.0))
        throw std::invalid_argument("global_damping must be in (0, 1]");
    if (!(dt_fraction > 0.0 && dt_fraction <= 1.0))
        throw std::invalid_argument("dt_fraction must be in (0, 1]");
    if (!(slip_threshold > 0.0))
        throw std::invalid_argument("slip_threshold must be positive");
    if (!(collision_skin > 0.0))
        throw std::invalid_argument("collision_skin must be positive");
}

bool Lattice::bonded(int a, int b) const
{
    const auto& nb = neighbors[static_cast<std::size_t>(a)];
    return std::find(nb.begin(), nb.end(), b) != nb.end();
}

std::vector<double> assign_phases(const Polycube& design, ActuationMode mode)
{
    const auto voxels = design.voxels();
    std::vector<double> phase(voxels.size(), 0.0);
    switch (mode)
    {
    case ActuationMode::AntiPhase:
        for (std::size_t k = 0; k < voxels.size(); ++k)
        {
            if (voxels[k].material == Material::None)
                throw std::invalid_argument("antiphase actuation needs PhaseA/PhaseB labels on every voxel");
            phase[k] = voxels[k].material == Material::PhaseB ? std::numbers::pi : 0.0;
        }
        break;
    case ActuationMode::PhaseWave: {
        auto [lo, hi] = std::minmax_element(voxels.begin(), voxels.end(),
                                            [](const Voxel& a, const Voxel& b) { return a.at.x < b.at.x; });
        const int x_min = lo->at.x;
        const int x_max = hi->at.x;
        if (x_max > x_min)
            for (std::size_t k = 0; k < voxels.size(); ++k)
                phase[k] = -2.0 * std::numbers::pi * (voxels[k].at.x - x_min) / static_cast<double>(x_max - x_min);
        break;
    }
    case ActuationMode::SingleBladder:
        break;
    }
    return phase;
}

double actuation_scale(double t, double phase, const MaterialParams& params)
{
    return 1.0 + params.linear_amplitude() * std::sin(2.0 * std::numbers::pi * params.frequency * t + phase);
}

double actuation_rest_length(double rest_length, double t, double phase, const MaterialParams& params)
{
    return rest_length * actuation_scale(t, phase, params);
}

double beam_rest_length(const SimState& s, const BeamSpec& beam, double t)
{
    const Lattice& lat = *s.lattice;
    if (lat.linear_amplitude == 0.0)
        return beam.rest_length;
    const double si = actuation_scale(t, lat.phase[static_cast<std::size_t>(beam.i)], lat.material);
    const double sj = actuation_scale(t, lat.phase[static_cast<std::size_t>(beam.j)], lat.material);
    return beam.rest_length * 0.5 * (si + sj);
}

SimState build_sim(const Polycube& design, ActuationMode mode, const MaterialParams& material,
                   const SolverParams& solver)
{
    material.validate();
    solver.validate();

    auto lat = std::make_shared<Lattice>();
    lat->material = material;
    lat->solver = solver;
    lat->mode = mode;
    const double s = design.voxel_size();
    lat->voxel_size = s;
    lat->mass = material.density * s * s * s;
    lat->inertia = lat->mass * s * s / 6.0;
    lat->linear_amplitude = material.linear_amplitude();

    const BeamStiffness k = BeamStiffness::for_voxel(material.youngs_modulus, material.shear_modulus(), s);
    lat->contact_stiffness = k.axial;
    lat->contact_damping = 2.0 * std::sqrt(lat->mass * lat->contact_stiffness);
    const double zeta = solver.beam_damping_ratio;
    const double linear_damping = 2.0 * zeta * std::sqrt(0.5 * lat->mass * k.axial);
    // Critical damping of each bond's relative mode: axial stretch with
    // reduced mass m/2, relative bending rotation (stiffness EI/L) with reduced inertia I/2.
    const double angular_damping = 2.0 * zeta * std::sqrt(0.5 * lat->inertia * k.bending);

    const auto voxels = design.voxels();
    const std::size_t n = voxels.size();
    lat->phase = assign_phases(design, mode);
    lat->distinct_phases = lat->phase;
    std::sort(lat->distinct_phases.begin(), lat->distinct_phases.end());
    lat->distinct_phases.erase(std::unique(lat->distinct_phases.begin(), lat->distinct_phases.end()),
                               lat->distinct_phases.end());
    for (double p : lat->phase)
        lat->phase_slot.push_back(static_cast<int>(
            std::lower_bound(lat->distinct_phases.begin(), lat->distinct_phases.end(), p) - lat->distinct_phases.begin()));
    lat->neighbors.assign(n, {-1, -1, -1, -1, -1, -1});
    std::vector<int> bond_count(n, 0);

    int z_min = voxels.front().at.z;
    for (const auto& v : voxels)
    {
        lat->coords.push_back(v.at);
        z_min = std::min(z_min, v.at.z);
    }

    for (int axis = 0; axis < 3; ++axis)
    {
        lat->axis_begin[static_cast<std::size_t>(axis)] = lat->beams.size();
        for (std::size_t a = 0; a < n; ++a)
        {
            Coord c = voxels[a].at;
            (axis == 0 ? c.x : axis == 1 ? c.y : c.z) += 1;
            const long b = find_coord(voxels, c);
            if (b < 0)
                continue;
            BeamSpec beam;
            beam.i = static_cast<int>(a);
            beam.j = static_cast<int>(b);
            beam.axis = axis;
            beam.rest_length = s;
            beam.stiffness = k;
            beam.linear_damping = linear_damping;
            beam.angular_damping = angular_damping;
            lat->beams.push_back(beam);
            lat->neighbors[a][static_cast<std::size_t>(bond_count[a]++)] = beam.j;
            lat->neighbors[static_cast<std::size_t>(b)][static_cast<std::size_t>(bond_count[static_cast<std::size_t>(b)]++)] =
                beam.i;
        }
    }
    lat->axis_begin[3] = lat->beams.size();

    for (std::size_t a = 0; a < n; ++a)
    {
        if (bond_count[a] < 6)
            lat->surface.push_back(static_cast<int>(a));
        for (int axis = 0; axis < 3; ++axis)
            for (int sign : {-1, 1})
            {
                Coord c = voxels[a].at;
                (axis == 0 ? c.x : axis == 1 ? c.y : c.z) += sign;
                if (find_coord(voxels, c) < 0)
                    lat->exposed_faces.push_back({static_cast<int>(a), axis, sign});
            }
    }

    SimState state;
    state.lattice = lat;
    state.position.reserve(n);
    for (const auto& v : voxels)
        state.position.push_back({(v.at.x + 0.5) * s, (v.at.y + 0.5) * s, (v.at.z - z_min + 0.5) * s});
    state.velocity.assign(n, {});
    state.orientation.assign(n, {});
    state.angular_velocity.assign(n, {});
    return state;
}

double stable_timestep(const Lattice& lattice)
{
    double k_max = lattice.contact_stiffness;
    for (const auto& b : lattice.beams)
        k_max = std::max({k_max, b.stiffness.axial, b.stiffness.shear});
    return lattice.solver.dt_fraction * std::sqrt(lattice.mass / k_max);
}

void accumulate_beam_loads(const SimState& s, std::span<Vec3> forces, std::span<Vec3> torques)
{
    std::vector<Frame> frame(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        frame[i] = frame_of(s.orientation[i]);
    add_beam_loads(s, frame, forces, torques);
}

namespace
{

Vec3 ground_force(const Lattice& lat, const Vec3& position, const Vec3& velocity, const Vec3& other, double dt)
{
    const double penetration = 0.5 * lat.voxel_size - position.z;
    if (penetration <= 0.0)
        return {};
    const double normal = std::max(0.0, lat.contact_stiffness * penetration - lat.contact_damping * velocity.z);
    Vec3 f{0.0, 0.0, normal};

    const Vec3 applied{other.x, other.y, 0.0};
    const Vec3 vt{velocity.x, velocity.y, 0.0};
    const double speed = norm(vt);
    const Vec3 stick = -applied - vt * (lat.mass / dt);
    Vec3 friction;
    if (speed < lat.solver.slip_threshold)
    {
        if (norm(applied) <= lat.material.mu_static * normal)
            friction = stick;
        else
            friction = applied * (-lat.material.mu_kinetic * normal / norm(applied));
    }
    else
    {
        friction = vt * (-lat.material.mu_kinetic * normal / speed);
        const Vec3 next = vt + (applied + friction) * (dt / lat.mass);
        // Sliding would reverse within this step: hold if static friction can.
        if (dot(next, vt) < 0.0 && norm(stick) <= lat.material.mu_static * normal)
            friction = stick;
    }
    return f + friction;
}

} // namespace

std::vector<Vec3> ground_contact_and_friction(const SimState& s, std::span<const Vec3> other_forces, double dt)
{
    const Lattice& lat = *s.lattice;
    std::vector<Vec3> out(s.size());
    if (!lat.solver.ground)
        return out;
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i] = ground_force(lat, s.position[i], s.velocity[i], other_forces[i], dt);
    return out;
}

std::vector<std::pair<int, int>> detect_collisions(const SimState& s)
{
    return surface_pairs_within(s, s.lattice->voxel_size);
}

std::vector<std::pair<int, int>> detect_collisions_brute_force(const SimState& s)
{
    const Lattice& lat = *s.lattice;
    const double reach_sq = lat.voxel_size * lat.voxel_size;
    std::vector<std::pair<int, int>> out;
    for (std::size_t a = 0; a < lat.surface.size(); ++a)
        for (std::size_t b = a + 1; b < lat.surface.size(); ++b)
        {
            const int i = lat.surface[a];
            const int j = lat.surface[b];
            if (lat.bonded(i, j))
                continue;
            if (norm_squared(s.position[static_cast<std::size_t>(i)] - s.position[static_cast<std::size_t>(j)]) <
                reach_sq)
                out.emplace_back(std::min(i, j), std::max(i, j));
        }
    std::sort(out.begin(), out.end());
    return out;
}

void step(SimState& s, double dt)
{
    const Lattice& lat = *s.lattice;
    const std::size_t n = s.size();
    Workspace& ws = workspace();
    ws.frame.resize(n);
    ws.force.assign(n, Vec3{0.0, 0.0, -lat.mass * lat.solver.gravity});
    ws.torque.assign(n, Vec3{});

    for (std::size_t i = 0; i < n; ++i)
        ws.frame[i] = frame_of(s.orientation[i]);
    if (!s.external_force.empty())
        for (std::size_t i = 0; i < n; ++i)
            ws.force[i] += s.external_force[i];

    add_beam_loads(s, ws.frame, ws.force, ws.torque);

    if (lat.solver.self_collision && lat.surface.size() > 1)
    {
        refresh_broad_phase(s);
        add_collision_forces(s, dt, ws.force);
    }

    if (lat.solver.ground)
    {
        const double reach = 0.5 * lat.voxel_size;
        for (std::size_t i = 0; i < n; ++i)
            if (s.position[i].z < reach)
                ws.force[i] += ground_force(lat, s.position[i], s.velocity[i], ws.force[i], dt);
    }

    const double damping = lat.solver.global_damping;
    const double inv_mass = 1.0 / lat.mass;
    const double inv_inertia = 1.0 / lat.inertia;
    const double speed_limit_sq = kMaxSpeed * kMaxSpeed;
    bool finite = true;
    for (std::size_t i = 0; i < n; ++i)
    {
        Vec3& v = s.velocity[i];
        v += ws.force[i] * (dt * inv_mass);
        v *= damping;
        s.position[i] += v * dt;

        Vec3& w = s.angular_velocity[i];
        w += ws.torque[i] * (dt * inv_inertia);
        w *= damping;
        s.orientation[i] = normalized(quat_from_rotation_vector(w * dt) * s.orientation[i]);

        if (!is_finite(s.position[i]) || !is_finite(w) || !(norm_squared(v) <= speed_limit_sq))
            finite = false;
    }
    s.time += dt;
    ++s.steps;
    if (!finite)
        throw SimulationDiverged("simulation diverged at t = " + std::to_string(s.time));
}

Vec3 center_of_mass(const SimState& s)
{
    Vec3 sum;
    for (const auto& p : s.position)
        sum += p;
    return sum / static_cast<double>(s.size());
}

double kinetic_energy(const SimState& s)
{
    const Lattice& lat = *s.lattice;
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        e += 0.5 * lat.mass * norm_squared(s.velocity[i]) + 0.5 * lat.inertia * norm_squared(s.angular_velocity[i]);
    return e;
}

double elastic_energy(const SimState& s)
{
    double e = 0.0;
    for (const BeamSpec& b : s.lattice->beams)
    {
        const auto i = static_cast<std::size_t>(b.i);
        const auto j = static_cast<std::size_t>(b.j);
        e += beam_energy(b.stiffness, b.axis, beam_rest_length(s, b, s.time),
                         {s.position[i], to_matrix(s.orientation[i])}, {s.position[j], to_matrix(s.orientation[j])});
    }
    return e;
}

double gravitational_energy(const SimState& s)
{
    double e = 0.0;
    for (const auto& p : s.position)
        e += s.lattice->mass * s.lattice->solver.gravity * p.z;
    return e;
}

double ground_contact_energy(const SimState& s)
{
    const Lattice& lat = *s.lattice;
    if (!lat.solver.ground)
        return 0.0;
    double e = 0.0;
    for (const auto& p : s.position)
    {
        const double pen = 0.5 * lat.voxel_size - p.z;
        if (pen > 0.0)
            e += 0.5 * lat.contact_stiffness * pen * pen;
    }
    return e;
}

} // namespace voxfract
