#pragma once

#include "voxfract/vec.hpp"

namespace voxfract
{

/// Stiffness terms of a square-section Euler-Bernoulli beam joining two voxel centers.
struct BeamStiffness
{
    double axial = 0.0;   // EA / L
    double shear = 0.0;   // 12 EI / L^3
    double bending = 0.0; // EI / L
    double torsion = 0.0; // GJ / L

    /// Section of edge `voxel_size`, length `voxel_size`.
    static BeamStiffness for_voxel(double youngs_modulus, double shear_modulus, double voxel_size);
};

/// Body axes of a voxel in world coordinates (the columns of its rotation).
struct Frame
{
    Vec3 axis[3];
};

inline Frame frame_of(const Mat3& r)
{
    return {{r.column(0), r.column(1), r.column(2)}};
}

inline Frame frame_of(const Quat& q)
{
    return frame_of(to_matrix(q));
}

struct BeamEnd
{
    Vec3 position;
    Mat3 rotation; // local-to-world
};

/// Force and torque on each end; force_j == -force_i exactly.
struct BeamLoad
{
    Vec3 force_i;
    Vec3 force_j;
    Vec3 torque_i;
    Vec3 torque_j;
};

/// Elastic energy of a beam whose rest axis is local axis `axis` (0, 1, 2) of
/// both ends, pointing from end i to end j.
///
/// E = k_a/2 (r - L)^2 + 2 EI/L (|w_i|^2 + w_i.w_j + |w_j|^2) + GJ/(2L) tau^2
///
/// where r is the end-to-end distance, w_e the transverse part of the chord
/// direction seen in end e's frame, and tau the twist sine about the axis.
/// For small deflections this reproduces the Euler-Bernoulli element
/// stiffnesses (12EI/L^3 transverse, 4EI/L end rotation, GJ/L twist).
inline double beam_energy(const BeamStiffness& k, int axis, double rest_length, const BeamEnd& i,
                          const BeamEnd& j);

/// Exact negative gradient of beam_energy. Torques are with respect to
/// world-frame infinitesimal rotations of each end.
inline BeamLoad beam_load(const BeamStiffness& k, int axis, double rest_length, const BeamEnd& i,
                          const BeamEnd& j);

namespace detail
{

// Transverse axes (b, c) completing a right-handed frame with the beam axis a.
constexpr int axis_b(int a) { return (a + 1) % 3; }
constexpr int axis_c(int a) { return (a + 2) % 3; }

} // namespace detail

inline double beam_energy(const BeamStiffness& k, int axis, double rest_length, const BeamEnd& i,
                          const BeamEnd& j)
{
    const Vec3 d = j.position - i.position;
    const double r = norm(d);
    const Vec3 n = d / r;
    const int b = detail::axis_b(axis), c = detail::axis_c(axis);
    const Vec3 bi = i.rotation.column(b), ci = i.rotation.column(c);
    const Vec3 bj = j.rotation.column(b), cj = j.rotation.column(c);
    // Transverse chord components in each end's frame.
    const double ui = dot(bi, n), vi = dot(ci, n);
    const double uj = dot(bj, n), vj = dot(cj, n);
    const double stretch = r - rest_length;
    const double tau = 0.5 * (dot(bi, cj) - dot(ci, bj));
    return 0.5 * k.axial * stretch * stretch +
           2.0 * k.bending * (ui * ui + vi * vi + ui * uj + vi * vj + uj * uj + vj * vj) +
           0.5 * k.torsion * tau * tau;
}

namespace detail
{

template <int Axis>
inline BeamLoad beam_load_axis(const BeamStiffness& k, double rest_length, const Vec3& pi, const Frame& fi,
                               const Vec3& pj, const Frame& fj)
{
    constexpr int b = axis_b(Axis), c = axis_c(Axis);
    const Vec3 d = pj - pi;
    const double r = norm(d);
    const double inv_r = 1.0 / r;
    const Vec3 n = d * inv_r;
    const Vec3& bi = fi.axis[b];
    const Vec3& ci = fi.axis[c];
    const Vec3& bj = fj.axis[b];
    const Vec3& cj = fj.axis[c];

    // Bending: dE/dw for each end, mapped back to world.
    const double ui = dot(bi, n), vi = dot(ci, n);
    const double uj = dot(bj, n), vj = dot(cj, n);
    const double kb2 = 2.0 * k.bending;
    const Vec3 gi = bi * (kb2 * (2.0 * ui + uj)) + ci * (kb2 * (2.0 * vi + vj));
    const Vec3 gj = bj * (kb2 * (2.0 * uj + ui)) + cj * (kb2 * (2.0 * vj + vi));
    const Vec3 dE_dn = gi + gj;

    // dE/dd: axial along n, bending through the chord direction.
    const Vec3 dE_dd = n * (k.axial * (r - rest_length)) + (dE_dn - n * dot(n, dE_dn)) * inv_r;

    // Rotating end e by dtheta changes its local chord by R^T (n x dtheta),
    // so dE/dtheta_e = g_e x n.
    Vec3 torque_i = cross(n, gi);
    Vec3 torque_j = cross(n, gj);

    const double tau = 0.5 * (dot(bi, cj) - dot(ci, bj));
    const Vec3 twist_torque = 0.5 * (cross(bi, cj) - cross(ci, bj)) * (k.torsion * tau);
    torque_i -= twist_torque;
    torque_j += twist_torque;

    return {dE_dd, -dE_dd, torque_i, torque_j};
}

} // namespace detail

inline BeamLoad beam_load(const BeamStiffness& k, int axis, double rest_length, const BeamEnd& i,
                          const BeamEnd& j)
{
    switch (axis)
    {
    case 0:
        return detail::beam_load_axis<0>(k, rest_length, i.position, frame_of(i.rotation), j.position,
                                         frame_of(j.rotation));
    case 1:
        return detail::beam_load_axis<1>(k, rest_length, i.position, frame_of(i.rotation), j.position,
                                         frame_of(j.rotation));
    default:
        return detail::beam_load_axis<2>(k, rest_length, i.position, frame_of(i.rotation), j.position,
                                         frame_of(j.rotation));
    }
}

} // namespace voxfract
