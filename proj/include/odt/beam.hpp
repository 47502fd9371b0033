#pragma once

#include "odt/vec3.hpp"

namespace odt {

// A focused Gaussian beam, possibly elliptical (independent waists along the
// two transverse axes, hence independent Rayleigh ranges).
struct GaussianBeam {
    double power = 0.0;       // W
    double waist_x = 0.0;     // m, 1/e^2 intensity radius along transverse_x at focus
    double waist_y = 0.0;     // m, along transverse_y = axis x transverse_x
    double wavelength = 0.0;  // m
    Vec3 axis{1.0, 0.0, 0.0};          // propagation direction (unit)
    Vec3 transverse_x{0.0, 1.0, 0.0};  // first transverse axis (unit, perp. to axis)
    Vec3 focus{0.0, 0.0, 0.0};         // focal point, m

    // Peak intensity 2P / (pi w0x w0y).
    double peak_intensity() const;
    double rayleigh_x() const;  // pi w0x^2 / lambda
    double rayleigh_y() const;

    // Throws std::invalid_argument on non-positive power/waists/wavelength or
    // non-orthonormal frame vectors.
    void validate() const;
};

// Intensity at a lab-frame point (W/m^2).
double beam_intensity(const GaussianBeam& beam, const Vec3& point);

// Intensity and its lab-frame gradient, sharing the frame transform.
double beam_intensity_gradient(const GaussianBeam& beam, const Vec3& point, Vec3& grad_out);

}  // namespace odt
