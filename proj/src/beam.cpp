#include "odt/beam.hpp"

#include <cmath>
#include <stdexcept>

#include "odt/constants.hpp"

namespace odt {

double GaussianBeam::peak_intensity() const {
    return 2.0 * power / (constants::pi * waist_x * waist_y);
}

double GaussianBeam::rayleigh_x() const { return constants::pi * waist_x * waist_x / wavelength; }

double GaussianBeam::rayleigh_y() const { return constants::pi * waist_y * waist_y / wavelength; }

void GaussianBeam::validate() const {
    if (!(power >= 0.0)) throw std::invalid_argument("beam power must be non-negative");
    if (!(waist_x > 0.0) || !(waist_y > 0.0))
        throw std::invalid_argument("beam waists must be positive");
    if (!(wavelength > 0.0)) throw std::invalid_argument("beam wavelength must be positive");
    const double tol = 1e-9;
    if (std::abs(axis.norm() - 1.0) > tol || std::abs(transverse_x.norm() - 1.0) > tol)
        throw std::invalid_argument("beam frame vectors must be unit length");
    if (std::abs(axis.dot(transverse_x)) > tol)
        throw std::invalid_argument("beam transverse_x must be orthogonal to axis");
}

namespace {

struct BeamFrame {
    double z;   // along axis, relative to focus
    double x;   // along transverse_x
    double y;   // along transverse_y
};

inline BeamFrame to_frame(const GaussianBeam& b, const Vec3& p) {
    const Vec3 d = p - b.focus;
    const Vec3 ty = b.axis.cross(b.transverse_x);
    return {d.dot(b.axis), d.dot(b.transverse_x), d.dot(ty)};
}

}  // namespace

double beam_intensity(const GaussianBeam& beam, const Vec3& point) {
    const BeamFrame f = to_frame(beam, point);
    const double zrx = beam.rayleigh_x();
    const double zry = beam.rayleigh_y();
    const double wx2 = beam.waist_x * beam.waist_x * (1.0 + (f.z / zrx) * (f.z / zrx));
    const double wy2 = beam.waist_y * beam.waist_y * (1.0 + (f.z / zry) * (f.z / zry));
    const double amp = beam.peak_intensity() * beam.waist_x * beam.waist_y / std::sqrt(wx2 * wy2);
    return amp * std::exp(-2.0 * f.x * f.x / wx2 - 2.0 * f.y * f.y / wy2);
}

double beam_intensity_gradient(const GaussianBeam& beam, const Vec3& point, Vec3& grad_out) {
    const BeamFrame f = to_frame(beam, point);
    const double zrx = beam.rayleigh_x();
    const double zry = beam.rayleigh_y();
    const double qx = zrx * zrx + f.z * f.z;
    const double qy = zry * zry + f.z * f.z;
    const double wx2 = beam.waist_x * beam.waist_x * qx / (zrx * zrx);
    const double wy2 = beam.waist_y * beam.waist_y * qy / (zry * zry);
    const double amp = beam.peak_intensity() * beam.waist_x * beam.waist_y / std::sqrt(wx2 * wy2);
    const double intensity = amp * std::exp(-2.0 * f.x * f.x / wx2 - 2.0 * f.y * f.y / wy2);

    // d ln I / d(frame coords); the axial term collects waist growth and the
    // widening of both exponential shoulders.
    const double dlnI_dx = -4.0 * f.x / wx2;
    const double dlnI_dy = -4.0 * f.y / wy2;
    const double dlnI_dz = -f.z / qx - f.z / qy + 4.0 * f.x * f.x * f.z / (qx * wx2) +
                           4.0 * f.y * f.y * f.z / (qy * wy2);

    const Vec3 ty = beam.axis.cross(beam.transverse_x);
    grad_out = intensity * (dlnI_dx * beam.transverse_x + dlnI_dy * ty + dlnI_dz * beam.axis);
    return intensity;
}

}  // namespace odt
