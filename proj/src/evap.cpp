#include "odt/evap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "odt/constants.hpp"
#include "odt/ode.hpp"

namespace odt {

namespace c = constants;

int TrapTimeline::segment_of(double time) const {
    const int n = static_cast<int>(t.size());
    if (time <= t.front()) return 0;
    if (time >= t.back()) return n - 2;
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    return static_cast<int>(it - t.begin()) - 1;
}

namespace {
double lerp_on(const std::vector<double>& tv, const std::vector<double>& yv, int seg,
               double time) {
    const size_t i = static_cast<size_t>(seg);
    const double x = (time - tv[i]) / (tv[i + 1] - tv[i]);
    const double xc = std::min(1.0, std::max(0.0, x));
    return yv[i] + (yv[i + 1] - yv[i]) * xc;
}
}  // namespace

double TrapTimeline::depth_at(double time) const {
    return lerp_on(t, depth, segment_of(time), time);
}
double TrapTimeline::mean_freq_at(double time) const {
    return lerp_on(t, mean_freq, segment_of(time), time);
}
double TrapTimeline::u0_primary_at(double time) const {
    return lerp_on(t, u0_primary, segment_of(time), time);
}
double TrapTimeline::log_freq_slope(int segment) const {
    const size_t i = static_cast<size_t>(segment);
    return (std::log(mean_freq[i + 1]) - std::log(mean_freq[i])) / (t[i + 1] - t[i]);
}

TrapTimeline build_trap_timeline(const TrapConfig& trap, const PowerSchedule& schedule,
                                 double t_begin, double t_end, int points) {
    if (points < 2) throw std::invalid_argument("timeline needs at least 2 points");
    if (!(t_end > t_begin)) throw std::invalid_argument("empty timeline span");
    schedule.validate();
    TrapTimeline tl;
    const auto& primary = trap.beams.at(0);
    tl.primary_waist = std::sqrt(primary.waist_x * primary.waist_y);
    tl.primary_wavelength = primary.wavelength;

    TrapConfig prev;
    TrapCharacterization chr{};
    bool have_prev = false;
    for (int i = 0; i < points; ++i) {
        const double time = t_begin + (t_end - t_begin) * i / (points - 1);
        TrapConfig at = trap_at_time(trap, schedule, time);
        // Consecutive grid points often share identical powers (hold
        // segments); characterize only when something changed.
        bool same = have_prev && at.beams.size() == prev.beams.size();
        if (same)
            for (size_t b = 0; b < at.beams.size(); ++b)
                same = same && at.beams[b].power == prev.beams[b].power;
        if (!same) {
            chr = characterize(at);
            prev = at;
            have_prev = true;
        }
        tl.t.push_back(time);
        tl.depth.push_back(chr.depth);
        tl.mean_freq.push_back(chr.mean_frequency);
        tl.u0_primary.push_back(chr.single_beam_depth_U0);
    }
    return tl;
}

std::vector<TrapSeriesPoint> trap_timeseries(const TrapConfig& trap,
                                             const PowerSchedule& schedule,
                                             const std::vector<double>& t_grid) {
    schedule.validate();
    std::vector<TrapSeriesPoint> out;
    out.reserve(t_grid.size());
    for (const double time : t_grid) {
        const TrapConfig at = trap_at_time(trap, schedule, time);
        const TrapCharacterization chr = characterize(at);
        TrapSeriesPoint p;
        p.t = time;
        p.depth = chr.depth;
        p.mean_frequency = chr.mean_frequency;
        if (at.beams.size() > 1 && at.beams[1].power > 0.0)
            p.aux_depth = dipole_coefficient(at.species, at.beams[1].wavelength) *
                          at.beams[1].peak_intensity();
        out.push_back(p);
    }
    return out;
}

double critical_temperature(double atom_number, double mean_frequency) {
    if (!(atom_number >= 1.0)) throw std::invalid_argument("need at least one atom");
    if (!(mean_frequency > 0.0)) throw std::invalid_argument("mean frequency must be > 0");
    return std::pow(c::zeta3, -1.0 / 3.0) * c::hbar * mean_frequency *
           std::cbrt(atom_number) / c::boltzmann;
}

namespace {

struct Rates {
    double n0 = 0.0;
    double gamma_el = 0.0;
    double wing_X = 0.0;
};

// Harmonic-profile peak density with the wing correction 1/(1+X): atoms that
// sit in the single-beam arms do not contribute to the crossing-region core.
Rates instantaneous_rates(const TrapTimeline& tl, const AtomSpecies& species, double time,
                          double N, double T) {
    Rates r;
    const double kT = c::boltzmann * T;
    const double eta_wing = tl.u0_primary_at(time) / kT;
    r.wing_X = (4.0 * c::pi * tl.primary_waist / tl.primary_wavelength) *
               std::exp(-eta_wing);
    const double wbar = tl.mean_freq_at(time);
    const double harm = N * std::pow(species.mass * wbar * wbar / (2.0 * c::pi * kT), 1.5);
    r.n0 = harm / (1.0 + r.wing_X);
    r.gamma_el = collision_rate(r.n0, T, species);
    return r;
}

}  // namespace

std::vector<TrajectoryPoint> evolve(const TruncatedThermalState& initial,
                                    const TrapConfig& trap, const PowerSchedule& schedule,
                                    const EvapModelParams& params) {
    if (!(initial.atom_number > 0.0) || !(initial.temperature > 0.0))
        throw std::invalid_argument("initial N and T must be positive");
    const double t0 = schedule.start_time();
    const double t1 = schedule.end_time();
    const TrapTimeline tl =
        build_trap_timeline(trap, schedule, t0, t1, params.timeline_points);
    const AtomSpecies& species = trap.species;

    const double K3_SI = (params.three_body_K3 < 0.0 ? species.three_body_K3
                                                     : params.three_body_K3) *
                         1e-12;  // cm^6/s -> m^6/s
    const double inv_tau =
        params.background_lifetime > 0.0 ? 1.0 / params.background_lifetime : 0.0;
    const double eps = params.evaporation_rate_scale;

    // State vector (ln N, ln T): positivity is structural and the tolerance
    // scales are dimensionless.
    std::array<double, 2> y = {std::log(initial.atom_number),
                               std::log(initial.temperature)};
    OdeOptions ode_opts;
    ode_opts.rel_tol = params.ode_rel_tol;
    ode_opts.abs_tol = params.ode_abs_tol;

    std::vector<TrajectoryPoint> traj;
    auto emit = [&](double time) {
        const double N = std::exp(y[0]);
        const double T = std::exp(y[1]);
        const Rates r = instantaneous_rates(tl, species, time, N, T);
        TrajectoryPoint p;
        p.t = time;
        p.atom_number = N;
        p.temperature = T;
        p.depth = tl.depth_at(time);
        p.eta = p.depth / (c::boltzmann * T);
        p.mean_frequency = tl.mean_freq_at(time);
        p.n0 = r.n0;
        p.psd = psd(r.n0, T, species);
        p.wing_fraction = r.wing_X / (1.0 + r.wing_X);
        p.degenerate = T <= critical_temperature(std::max(N, 1.0), p.mean_frequency);
        traj.push_back(p);
    };

    emit(tl.t.front());
    for (size_t seg = 0; seg + 1 < tl.t.size(); ++seg) {
        const double slope = tl.log_freq_slope(static_cast<int>(seg));
        auto rhs = [&](double time, const std::array<double, 2>& ly,
                       std::array<double, 2>& dy) {
            const double N = std::exp(ly[0]);
            const double T = std::exp(ly[1]);
            const Rates r = instantaneous_rates(tl, species, time, N, T);
            const double eta = tl.depth_at(time) / (c::boltzmann * T);
            double g_ev = 0.0, ev_T = 0.0;
            if (eta > 4.0) {
                const double base = eps * r.gamma_el * std::exp(-eta);
                g_ev = base * (eta - 4.0);
                // G_ev (eta' - 3) written without the (eta-4) pole:
                // (eta-4)(eta-3) + (eta-5).
                ev_T = (base / 3.0) * ((eta - 4.0) * (eta - 3.0) + (eta - 5.0));
            }
            const double g_3b = K3_SI * r.n0 * r.n0 / std::sqrt(27.0);
            const double cap = params.adiabatic_cap_fraction * r.gamma_el;
            const double s_eff = std::min(cap, std::max(-cap, slope));
            dy[0] = -(g_ev + inv_tau + g_3b);
            dy[1] = -ev_T + g_3b / 3.0 + s_eff;
        };
        integrate_ode<2>(rhs, y, tl.t[seg], tl.t[seg + 1], ode_opts);
        emit(tl.t[seg + 1]);
        if (std::exp(y[0]) < 1.0)
            throw StateCollapseError("atom number fell below one", std::move(traj));
    }
    return traj;
}

StagnationReport detect_stagnation(const std::vector<TrajectoryPoint>& trajectory,
                                   const AtomSpecies& species) {
    if (trajectory.size() < 10)
        throw std::invalid_argument("stagnation detection needs at least 10 points");
    StagnationReport rep;
    size_t peak = 0;
    for (size_t i = 1; i < trajectory.size(); ++i)
        if (trajectory[i].psd > trajectory[peak].psd) peak = i;
    rep.peak_psd = trajectory[peak].psd;
    rep.peak_time = trajectory[peak].t;
    rep.collision_rate_at_peak =
        collision_rate(trajectory[peak].n0, trajectory[peak].temperature, species);

    // Smoothed running slope over a short trailing window; strictly falling N
    // distinguishes stagnation from a schedule that simply ended.
    const size_t w = 3;
    for (size_t i = w; i < trajectory.size(); ++i) {
        const double dpsd = trajectory[i].psd - trajectory[i - w].psd;
        const double dt = trajectory[i].t - trajectory[i - w].t;
        const bool n_falling = trajectory[i].atom_number < trajectory[i - w].atom_number;
        if (dt > 0.0 && dpsd / dt <= 0.0 && n_falling) {
            rep.stagnated = true;
            rep.time = trajectory[i].t;
            break;
        }
    }
    return rep;
}

}  // namespace odt
