#include "voxfract/physics/beam.hpp"

namespace voxfract
{

BeamStiffness BeamStiffness::for_voxel(double youngs_modulus, double shear_modulus, double voxel_size)
{
    const double s = voxel_size;
    const double area = s * s;
    const double second_moment = s * s * s * s / 12.0;
    const double polar_moment = s * s * s * s / 6.0;
    BeamStiffness k;
    k.axial = youngs_modulus * area / s;
    k.shear = 12.0 * youngs_modulus * second_moment / (s * s * s);
    k.bending = youngs_modulus * second_moment / s;
    k.torsion = shear_modulus * polar_moment / s;
    return k;
}

} // namespace voxfract
