#pragma once

#include <cstdint>

#include "odt/special.hpp"
#include "odt/trap.hpp"
#include "odt/volume.hpp"

namespace odt {

// Quasi-equilibrium of a trapped gas whose energy distribution is a Boltzmann
// distribution truncated at the trap depth: n(r) = n0 exp(-eta u) P(3/2,
// eta (beta - u)) with u the potential above the minimum in units of the
// primary-beam depth U0.
struct TruncatedThermalState {
    TrapConfig trap;
    TrapCharacterization chr;
    double atom_number = 0.0;
    double temperature = 0.0;  // K
    double eta = 0.0;          // U0 / k_b T
    double beta = 0.0;         // depth / U0
    double n0 = 0.0;           // m^-3 density prefactor; set by exact_populations
};

TruncatedThermalState make_state(const TrapConfig& trap, double atom_number,
                                 double temperature);
TruncatedThermalState make_state(const TrapConfig& trap, const TrapCharacterization& chr,
                                 double atom_number, double temperature);

enum class PopulationMethod { exact, analytic };

struct PopulationReport {
    double center_number = 0.0;  // atoms at u < 1 (beam-crossing region)
    double wing_number = 0.0;    // atoms at 1 <= u < beta (single-beam arms)
    double wing_fraction = 0.0;
    double n0 = 0.0;  // m^-3
    double psd = 0.0; // n0 * thermal de Broglie wavelength cubed
    PopulationMethod method = PopulationMethod::exact;
    // Monte Carlo standard errors (exact method only).
    double center_err = 0.0;
    double wing_err = 0.0;
    double wing_fraction_err = 0.0;
    double n0_err = 0.0;
};

// Normalizes N = n0 * integral of exp(-eta u) P(3/2, eta (beta-u)) dV/du du
// over [0, beta] using the tabulated volume density; splits at u=1 into the
// center and wing populations (the straddling bin is split fractionally, so
// center + wing = N exactly). Stores n0 on the state. Throws ToleranceNotMet
// if the relative MC error of the normalization integral exceeds max_rel_err.
PopulationReport exact_populations(TruncatedThermalState& state, const VolumeTable& table,
                                   double max_rel_err = 0.005);

// Independent check of exact_populations: direct 3-D Monte Carlo of the same
// spatial integrals without the u-histogram, with its own error bars. Shares
// the deterministic sharded-stream machinery of the volume sampler.
PopulationReport spatial_populations(const TruncatedThermalState& state,
                                     std::uint64_t n_samples, std::uint64_t seed,
                                     int threads = 0, double max_rel_err = 0.005);

// Closed forms for equal circular crossed beams in the deep-trap harmonic
// approximation: X = (4 pi w0/lambda) exp(-eta), wing fraction X/(1+X),
// n0 = (4N/w0^3)(eta/pi)^(3/2) / (1+X). Pass species and temperature to also
// fill the phase-space density.
PopulationReport analytic_populations(double atom_number, double eta, double waist,
                                      double wavelength,
                                      const AtomSpecies* species = nullptr,
                                      double temperature = 0.0);

// Density at a point (m^-3); requires a normalized state (n0 set).
double density_at(const TruncatedThermalState& state, const Vec3& r);

// eta at which the analytic wing fraction crosses one half: ln(4 pi w0/lambda).
double wing_fraction_half_point(double waist, double wavelength);

// Phase-space density n0 * lambda_dB^3 with lambda_dB = h/sqrt(2 pi m k_b T).
double psd(double n0, double temperature, const AtomSpecies& species);

// Elastic collision rate n0 * sigma * vbar, sigma = 8 pi a^2,
// vbar = sqrt(8 k_b T / pi m).
double collision_rate(double n0, double temperature, const AtomSpecies& species);

// Axial oscillation period of the designated wing beam: thermalization in the
// wings is paced by the axial frequency.
double thermalization_time(double omega_axial);

// Collision rate in the wings (density n0 e^-eta) over the axial frequency.
double wing_collision_ratio(double n0, double temperature, const AtomSpecies& species,
                            double eta, double omega_axial);

}  // namespace odt
