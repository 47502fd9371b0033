#pragma once

#include <stdexcept>
#include <vector>

#include "odt/schedule.hpp"
#include "odt/thermo.hpp"
#include "odt/trap.hpp"

namespace odt {

struct EvapModelParams {
    double background_lifetime = 6.0;  // s; <= 0 disables background loss
    // Three-body event constant in cm^6/s; negative selects the species value,
    // zero disables the channel.
    double three_body_K3 = -1.0;
    double ode_rel_tol = 1e-6;
    double ode_abs_tol = 1e-9;
    // Scales the truncated-Boltzmann evaporation rate; 1.0 is the plain model,
    // 0 switches evaporation off (for adiabatic-invariance checks).
    double evaporation_rate_scale = 1.0;
    // The adiabatic heating/cooling term d ln(mean freq)/dt is clipped to this
    // fraction of the elastic collision rate: faster trap changes are not
    // adiabatically followed by the gas.
    double adiabatic_cap_fraction = 1.0 / 3.0;
    // Grid resolution for the precomputed trap timeline (also the trajectory
    // output resolution).
    int timeline_points = 600;
};

struct TrajectoryPoint {
    double t = 0.0;               // s
    double atom_number = 0.0;
    double temperature = 0.0;     // K
    double eta = 0.0;             // depth / k_b T
    double depth = 0.0;           // J
    double mean_frequency = 0.0;  // rad/s
    double n0 = 0.0;              // m^-3
    double psd = 0.0;
    double wing_fraction = 0.0;
    bool degenerate = false;      // T <= Tc(N, mean_frequency)
};

// Trajectory aborted because the state left the model's domain (N < 1);
// carries everything integrated so far.
struct StateCollapseError : std::runtime_error {
    std::vector<TrajectoryPoint> partial;
    StateCollapseError(const std::string& what, std::vector<TrajectoryPoint> partial_)
        : std::runtime_error(what), partial(std::move(partial_)) {}
};

// Trap properties sampled on a uniform time grid, linearly interpolated by the
// kinetics integrator (characterize() is far too slow to call per ODE step).
struct TrapTimeline {
    std::vector<double> t;
    std::vector<double> depth;       // J
    std::vector<double> mean_freq;   // rad/s
    std::vector<double> u0_primary;  // J
    double primary_waist = 0.0;      // m, geometric mean of the primary waists
    double primary_wavelength = 0.0; // m

    int segment_of(double time) const;
    double depth_at(double time) const;
    double mean_freq_at(double time) const;
    double u0_primary_at(double time) const;
    // d ln(mean_freq)/dt, piecewise constant per grid segment.
    double log_freq_slope(int segment) const;
};

TrapTimeline build_trap_timeline(const TrapConfig& trap, const PowerSchedule& schedule,
                                 double t_begin, double t_end, int points);

struct TrapSeriesPoint {
    double t = 0.0;
    double depth = 0.0;           // J, full trap
    double aux_depth = 0.0;       // J, second beam alone (0 if absent)
    double mean_frequency = 0.0;  // rad/s
};

// characterize() at every grid time with scheduled powers.
std::vector<TrapSeriesPoint> trap_timeseries(const TrapConfig& trap,
                                             const PowerSchedule& schedule,
                                             const std::vector<double>& t_grid);

// Integrates the truncated-Boltzmann evaporation kinetics in the harmonic
// approximation:
//   dN/dt = -(G_ev + 1/tau + G_3b) N,   G_ev = Gel (eta-4) e^-eta
//   dT/dt = -(G_ev/3)(eta' - 3) T + (G_3b/3) T + s_eff T
// with eta' = eta + (eta-5)/(eta-4) (mean removed energy eta' k_b T), eta
// recomputed from the instantaneous depth, and s_eff the clipped adiabatic
// term. Emits one point per timeline node.
std::vector<TrajectoryPoint> evolve(const TruncatedThermalState& initial,
                                    const TrapConfig& trap, const PowerSchedule& schedule,
                                    const EvapModelParams& params = {});

// Ideal-gas harmonic-trap condensation threshold: Tc = zeta(3)^(-1/3) hbar
// mean_frequency N^(1/3) / k_b.
double critical_temperature(double atom_number, double mean_frequency);

struct StagnationReport {
    bool stagnated = false;
    double time = 0.0;                    // s, onset of non-positive PSD slope
    double peak_psd = 0.0;
    double peak_time = 0.0;               // s
    double collision_rate_at_peak = 0.0;  // 1/s
};

// Flags the first time the smoothed PSD derivative turns non-positive while N
// is still strictly decreasing. Requires at least 10 points.
StagnationReport detect_stagnation(const std::vector<TrajectoryPoint>& trajectory,
                                   const AtomSpecies& species);

}  // namespace odt
