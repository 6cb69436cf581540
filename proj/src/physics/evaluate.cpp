#include "voxfract/physics/evaluate.hpp"

#include "voxfract/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>

namespace voxfract
{

TrajectoryWriter::TrajectoryWriter(std::ostream* csv, std::ostream* mesh, double interval)
    : csv_(csv), mesh_(mesh), interval_(interval)
{
    if (csv_)
        *csv_ << "t,com_x,com_y,com_z,kinetic_energy,elastic_energy\n";
}

void TrajectoryWriter::record(const SimState& s)
{
    if (s.time + 1e-12 < next_)
        return;
    write_frame(s);
    next_ += interval_;
}

void TrajectoryWriter::finish(const SimState& s)
{
    if (s.time != last_time_)
        write_frame(s);
}

void TrajectoryWriter::write_frame(const SimState& s)
{
    last_time_ = s.time;
    const Vec3 com = center_of_mass(s);
    if (csv_)
        fmt::print(*csv_, "{},{},{},{},{},{}\n", s.time, com.x, com.y, com.z, kinetic_energy(s), elastic_energy(s));
    if (mesh_)
    {
        const Lattice& lat = *s.lattice;
        const double h = 0.5 * lat.voxel_size;
        fmt::print(*mesh_, "frame {} t {} quads {}\n", frame_, s.time, lat.exposed_faces.size());
        for (const auto& face : lat.exposed_faces)
        {
            const auto m = static_cast<std::size_t>(face.mass);
            const Mat3 r = to_matrix(s.orientation[m]);
            const int u = (face.axis + 1) % 3;
            const int v = (face.axis + 2) % 3;
            const Vec3 center = s.position[m] + r.column(face.axis) * (h * face.sign);
            const Vec3 du = r.column(u) * h;
            const Vec3 dv = r.column(v) * h;
            // Counter-clockwise seen from outside (u x v is +axis).
            Vec3 corners[4] = {center - du - dv, center + du - dv, center + du + dv, center - du + dv};
            if (face.sign < 0)
                std::swap(corners[1], corners[3]);
            fmt::print(*mesh_, "q");
            for (const auto& c : corners)
                fmt::print(*mesh_, " {} {} {}", c.x, c.y, c.z);
            fmt::print(*mesh_, "\n");
        }
    }
    ++frame_;
}

Displacement simulate_displacement(const Polycube& structure, double body_length, ActuationMode mode,
                                   const EvalSettings& settings, TrajectoryWriter* trajectory)
{
    SimState s = build_sim(structure, mode, settings.material, settings.solver);
    const double dt_max = stable_timestep(*s.lattice);
    const auto steps = static_cast<std::size_t>(std::ceil(settings.duration / dt_max));
    const double dt = steps > 0 ? settings.duration / static_cast<double>(steps) : 0.0;

    Displacement out;
    out.body_length = body_length;
    out.voxels = structure.size();
    const Vec3 start = center_of_mass(s);
    try
    {
        for (std::size_t k = 0; k < steps; ++k)
        {
            if (trajectory)
                trajectory->record(s);
            step(s, dt);
        }
    }
    catch (const SimulationDiverged&)
    {
        out.diverged = true;
        out.steps = s.steps;
        return out;
    }
    if (trajectory)
        trajectory->finish(s);
    const Vec3 end = center_of_mass(s);
    out.meters = std::hypot(end.x - start.x, end.y - start.y);
    out.body_lengths = out.meters / body_length;
    out.steps = s.steps;
    return out;
}

Displacement evaluate_displacement(const Polycube& basal, int level, ActuationMode mode, const EvalSettings& settings,
                                   TrajectoryWriter* trajectory)
{
    const Polycube structure = fractalize(basal, level, settings.voxel_budget);
    return simulate_displacement(structure, body_length(basal, level), mode, settings, trajectory);
}

} // namespace voxfract
