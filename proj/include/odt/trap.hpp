#pragma once

#include <vector>

#include "odt/beam.hpp"
#include "odt/species.hpp"
#include "odt/vec3.hpp"

namespace odt {

// A dipole trap: one or more far-red-detuned Gaussian beams plus optional
// gravity acting on a single species.
struct TrapConfig {
    AtomSpecies species;
    std::vector<GaussianBeam> beams;
    bool gravity_enabled = false;
    double gravity_acceleration = 0.0;  // m/s^2, pulls along -z
};

struct CharacterizeOptions {
    // Relative step (fraction of the smallest beam waist) for the numeric
    // Hessian used to extract trap frequencies.
    double hessian_step_frac = 1e-3;
    // Axial escape scans extend this many Rayleigh ranges from each focus.
    // For crossed beams this range sets the wing-boundary convention that
    // defines the trap depth ratio beta.
    double axial_scan_rayleigh = 3.0;
    // Transverse escape scans extend this many waists.
    double transverse_scan_waists = 8.0;
    int scan_points = 4096;
};

struct TrapCharacterization {
    Vec3 minimum_position;       // m
    double minimum_potential;    // J (raw dipole + gravity potential, < 0)
    double depth;                // J, lowest escape barrier above the minimum
    double frequencies[3];       // rad/s, descending
    Vec3 principal_axes[3];      // unit curvature eigenvectors, matching frequencies
    double mean_frequency;       // rad/s, geometric mean
    double single_beam_depth_U0; // J, kappa * I0 of the first beam at its own focus
    double beta;                 // depth / single_beam_depth_U0
};

// Far-off-resonance ground-state dipole coefficient kappa for the two
// dominant lines (weights 1/3 and 2/3), resonant term only:
//   kappa = (3 pi c^2 / 2) [ (1/3) G1 / (w1^3 (w1 - w)) + (2/3) G2 / (w2^3 (w2 - w)) ]
// Potential is U = -kappa I. Requires red detuning from the lower line.
double dipole_coefficient(const AtomSpecies& species, double wavelength);

// Total potential (J) at a lab point: sum of -kappa_i I_i plus m g z if enabled.
double potential_at(const TrapConfig& trap, const Vec3& point);

// Potential and its analytic gradient.
double potential_gradient_at(const TrapConfig& trap, const Vec3& point, Vec3& grad_out);

// Locate the minimum, measure curvature, and scan every escape channel for
// the lowest barrier. Throws NoMinimumError / DegenerateHessianError.
TrapCharacterization characterize(const TrapConfig& trap,
                                  const CharacterizeOptions& opts = {});

// Precomputed per-beam constants for the evaluation-heavy Monte Carlo paths.
class PreparedTrap {
  public:
    explicit PreparedTrap(const TrapConfig& trap);

    double potential(const Vec3& point) const;
    int beam_count() const { return static_cast<int>(beams_.size()); }
    double beam_depth_U0(int i) const { return kappa_[static_cast<size_t>(i)] * beams_[static_cast<size_t>(i)].peak_intensity(); }

  private:
    std::vector<GaussianBeam> beams_;
    std::vector<double> kappa_;
    bool gravity_ = false;
    double mg_ = 0.0;
};

}  // namespace odt
