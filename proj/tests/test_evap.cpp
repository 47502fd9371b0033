#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "odt/constants.hpp"
#include "odt/errors.hpp"
#include "odt/evap.hpp"
#include "odt/species.hpp"

#include "oracles.hpp"

namespace c = odt::constants;
using oracles::crossed_trap;
using oracles::single_beam_trap;

namespace {

odt::PowerSchedule crossed_hold(double power, double duration) {
    odt::PowerSchedule sched;
    sched.beams.resize(2);
    for (auto& segs : sched.beams)
        segs.push_back({0.0, duration, odt::RampKind::hold, power, power});
    return sched;
}

odt::PowerSchedule crossed_linear(double p0, double p1, double duration) {
    odt::PowerSchedule sched;
    sched.beams.resize(2);
    for (auto& segs : sched.beams)
        segs.push_back({0.0, duration, odt::RampKind::linear, p0, p1});
    return sched;
}

odt::TruncatedThermalState crossed_state(const odt::TrapConfig& trap, double atoms,
                                         double depth_over_kT) {
    const odt::TrapCharacterization chr = odt::characterize(trap);
    const double T = chr.depth / (c::boltzmann * depth_over_kT);
    return odt::make_state(trap, chr, atoms, T);
}

}  // namespace

TEST_CASE("condensation threshold") {
    CHECK(odt::critical_temperature(2e5, 2.0 * c::pi * 100.0) ==
          doctest::Approx(oracles::kTc_2e5_100Hz).epsilon(1e-12));
    // Tc scales as N^(1/3): eight times the atoms doubles it.
    const double tc1 = odt::critical_temperature(3.7e5, 5000.0);
    const double tc8 = odt::critical_temperature(8 * 3.7e5, 5000.0);
    CHECK(tc8 == doctest::Approx(2.0 * tc1).epsilon(1e-14));
    // Single atom: Tc = zeta(3)^(-1/3) hbar wbar / k_b.
    CHECK(odt::critical_temperature(1.0, 1000.0) ==
          doctest::Approx(oracles::kZeta3InvCbrt * c::hbar * 1000.0 / c::boltzmann)
              .epsilon(1e-12));
    CHECK_THROWS_AS(odt::critical_temperature(0.5, 1000.0), std::invalid_argument);
    CHECK_THROWS_AS(odt::critical_temperature(1e5, 0.0), std::invalid_argument);
}

TEST_CASE("power schedule validation and interpolation") {
    odt::PowerSchedule ok;
    ok.beams.resize(1);
    ok.beams[0].push_back({0.0, 1.0, odt::RampKind::hold, 2.0, 2.0});
    ok.beams[0].push_back({1.0, 2.0, odt::RampKind::linear, 2.0, 1.0});
    CHECK_NOTHROW(ok.validate());
    CHECK(ok.start_time() == 0.0);
    CHECK(ok.end_time() == 2.0);
    CHECK(ok.power_at(0, -5.0, 9.0) == 2.0);   // clamp to first segment
    CHECK(ok.power_at(0, 0.4, 9.0) == 2.0);
    CHECK(ok.power_at(0, 1.5, 9.0) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(ok.power_at(0, 99.0, 9.0) == 1.0);   // clamp to last segment
    CHECK(ok.power_at(1, 0.5, 9.0) == 9.0);    // no segments: fallback
    CHECK(ok.power_at(7, 0.5, 9.0) == 9.0);

    odt::PowerSchedule expo;
    expo.beams.resize(1);
    expo.beams[0].push_back({0.0, 1.0, odt::RampKind::exponential, 4.0, 1.0});
    CHECK(expo.power_at(0, 0.5, 9.0) == doctest::Approx(2.0).epsilon(1e-12));

    odt::PowerSchedule bad = ok;
    bad.beams[0][1].t_start = 1.2;  // gap
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.beams[0][1].t_start = 0.5;  // overlap
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.beams[0][0].p_end = 3.0;  // hold with mismatched powers
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.beams[0][1].p_end = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.beams[0][1].kind = odt::RampKind::exponential;
    bad.beams[0][1].p_end = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = ok;
    bad.beams[0][0].t_end = 0.0;  // empty interval
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    const odt::TrapConfig trap = crossed_trap();
    odt::PowerSchedule partial;
    partial.beams.resize(1);
    partial.beams[0].push_back({0.0, 1.0, odt::RampKind::hold, 0.7, 0.7});
    const odt::TrapConfig at = odt::trap_at_time(trap, partial, 0.5);
    CHECK(at.beams[0].power == 0.7);
    CHECK(at.beams[1].power == 1.0);  // keeps its configured power
}

TEST_CASE("a lossless hold conserves atom number and temperature") {
    const odt::TrapConfig trap = crossed_trap();
    odt::EvapModelParams params;
    params.evaporation_rate_scale = 0.0;
    params.background_lifetime = 0.0;
    params.three_body_K3 = 0.0;
    params.timeline_points = 200;
    const odt::TruncatedThermalState st = crossed_state(trap, 1e6, 10.0);
    const auto traj = odt::evolve(st, trap, crossed_hold(1.0, 0.5), params);
    REQUIRE(traj.size() == 200);
    for (const auto& p : traj) {
        CHECK(p.atom_number == doctest::Approx(1e6).epsilon(1e-12));
        CHECK(p.temperature == doctest::Approx(st.temperature).epsilon(1e-12));
        CHECK(!p.degenerate);  // microkelvin gas, nanokelvin threshold
    }
}

TEST_CASE("a slow power ramp is adiabatic: T tracks the mean frequency") {
    const odt::TrapConfig trap = crossed_trap();
    odt::EvapModelParams params;
    params.evaporation_rate_scale = 0.0;
    params.background_lifetime = 0.0;
    params.three_body_K3 = 0.0;
    const odt::TruncatedThermalState st = crossed_state(trap, 1e6, 10.0);
    const auto traj = odt::evolve(st, trap, crossed_linear(1.0, 0.5, 2.0), params);

    const auto& a = traj.front();
    const auto& b = traj.back();
    CHECK(a.atom_number == doctest::Approx(b.atom_number).epsilon(1e-12));
    // The adiabatic term integrates the log-frequency change exactly.
    CHECK(b.temperature / a.temperature ==
          doctest::Approx(b.mean_frequency / a.mean_frequency).epsilon(1e-9));
    // Frequencies scale as sqrt(P), so halving the power cools by sqrt(2).
    CHECK(b.temperature / a.temperature ==
          doctest::Approx(std::sqrt(0.5)).epsilon(1e-5));
    // Depth follows the power linearly; eta = depth/kT falls as sqrt(P).
    CHECK(b.eta / a.eta == doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
    // Shallower trap holds relatively more wing population.
    CHECK(b.wing_fraction > a.wing_fraction);
}

TEST_CASE("evaporation books eta' k T of energy per lost atom") {
    const odt::TrapConfig trap = crossed_trap();
    odt::EvapModelParams params;
    params.background_lifetime = 0.0;
    params.three_body_K3 = 0.0;
    const odt::TruncatedThermalState st = crossed_state(trap, 1e6, 9.0);
    const auto traj = odt::evolve(st, trap, crossed_hold(1.0, 1.0), params);

    double lost = 0.0;
    for (size_t i = 1; i < traj.size(); ++i) {
        const auto& p0 = traj[i - 1];
        const auto& p1 = traj[i];
        const double dlnN = std::log(p1.atom_number / p0.atom_number);
        CHECK(dlnN <= 0.0);
        const double lhs =
            std::log(p1.atom_number * p1.temperature / (p0.atom_number * p0.temperature));
        const double t_mid = std::sqrt(p0.temperature * p1.temperature);
        const double eta_mid = p0.depth / (c::boltzmann * t_mid);
        const double eta_prime = eta_mid + (eta_mid - 5.0) / (eta_mid - 4.0);
        // d ln(NT) = (eta'/3) d ln N for plain evaporation.
        CHECK(lhs == doctest::Approx(eta_prime / 3.0 * dlnN)
                         .epsilon(1e-3)
                         .scale(std::abs(dlnN) + 1e-12));
        lost += -dlnN;
    }
    CHECK(lost > 0.01);  // the hold actually evaporated something
    CHECK(traj.back().eta > traj.front().eta);  // runaway eta growth at fixed depth
}

TEST_CASE("tightening the ODE tolerance does not move the answer") {
    const odt::TrapConfig trap = crossed_trap();
    odt::EvapModelParams coarse;
    coarse.ode_rel_tol = 1e-6;
    coarse.ode_abs_tol = 1e-9;
    odt::EvapModelParams fine = coarse;
    fine.ode_rel_tol = 1e-9;
    fine.ode_abs_tol = 1e-12;
    const odt::TruncatedThermalState st = crossed_state(trap, 1e6, 8.0);
    const auto sched = crossed_linear(1.0, 0.4, 1.5);
    const auto a = odt::evolve(st, trap, sched, coarse);
    const auto b = odt::evolve(st, trap, sched, fine);
    CHECK(a.back().atom_number == doctest::Approx(b.back().atom_number).epsilon(1e-5));
    CHECK(a.back().temperature == doctest::Approx(b.back().temperature).epsilon(1e-5));
}

TEST_CASE("atom number never increases under the full loss model") {
    const odt::TrapConfig trap = crossed_trap();
    odt::EvapModelParams params;  // background + three-body + evaporation all on
    const odt::TruncatedThermalState st = crossed_state(trap, 1e6, 8.0);
    const auto traj = odt::evolve(st, trap, crossed_linear(1.0, 0.3, 1.5), params);
    for (size_t i = 1; i < traj.size(); ++i)
        CHECK(traj[i].atom_number <= traj[i - 1].atom_number * (1.0 + 1e-12));
    CHECK(traj.back().atom_number < 1e6);
}

TEST_CASE("losing the last atom aborts with the partial trajectory attached") {
    const odt::TrapConfig trap = crossed_trap();
    odt::EvapModelParams params;
    params.background_lifetime = 0.01;  // 10 ms lifetime
    params.evaporation_rate_scale = 0.0;
    params.three_body_K3 = 0.0;
    const odt::TrapCharacterization chr = odt::characterize(trap);
    const double T = chr.depth / (c::boltzmann * 10.0);
    const odt::TruncatedThermalState st = odt::make_state(trap, chr, 2.0, T);
    bool thrown = false;
    try {
        odt::evolve(st, trap, crossed_hold(1.0, 1.0), params);
    } catch (const odt::StateCollapseError& e) {
        thrown = true;
        REQUIRE(!e.partial.empty());
        CHECK(e.partial.front().atom_number == doctest::Approx(2.0).epsilon(1e-9));
        CHECK(e.partial.back().atom_number < 1.0);
        // ln N falls at 1/tau: the last atom is gone within ~10 ms.
        CHECK(e.partial.back().t < 0.05);
    }
    CHECK(thrown);
}

TEST_CASE("stagnation detector") {
    const odt::AtomSpecies rb = odt::rubidium87();
    std::vector<odt::TrajectoryPoint> traj;
    for (int i = 0; i < 30; ++i) {
        odt::TrajectoryPoint p;
        p.t = 0.1 * i;
        p.atom_number = 1e6 - 1e4 * i;
        p.temperature = 1e-6;
        p.n0 = 1e19 + 1e17 * i;
        p.psd = i <= 15 ? static_cast<double>(i) : 15.0 - 0.5 * (i - 15);
        traj.push_back(p);
    }
    const odt::StagnationReport rep = odt::detect_stagnation(traj, rb);
    CHECK(rep.stagnated);
    CHECK(rep.peak_psd == 15.0);
    CHECK(rep.peak_time == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.time == doctest::Approx(1.7).epsilon(1e-12));  // first flat window
    CHECK(rep.collision_rate_at_peak ==
          doctest::Approx(odt::collision_rate(1e19 + 1e17 * 15, 1e-6, rb)).epsilon(1e-12));

    // Monotone growth is not stagnation.
    for (int i = 0; i < 30; ++i) traj[static_cast<size_t>(i)].psd = i;
    CHECK(!odt::detect_stagnation(traj, rb).stagnated);

    // A flat PSD with constant N is a finished schedule, not stagnation.
    for (auto& p : traj) {
        p.psd = 5.0;
        p.atom_number = 1e6;
    }
    CHECK(!odt::detect_stagnation(traj, rb).stagnated);

    traj.resize(9);
    CHECK_THROWS_AS(odt::detect_stagnation(traj, rb), std::invalid_argument);
}

TEST_CASE("trap timeseries tracks the schedule") {
    const odt::TrapConfig trap = single_beam_trap();  // 15 W, 25 um
    odt::PowerSchedule sched;
    sched.beams.resize(1);
    sched.beams[0].push_back({0.0, 1.0, odt::RampKind::linear, 15.0, 7.5});
    const std::vector<double> grid = {0.0, 0.5, 1.0};
    const auto series = odt::trap_timeseries(trap, sched, grid);
    REQUIRE(series.size() == 3);
    CHECK(series[0].depth / c::boltzmann * 1e3 ==
          doctest::Approx(oracles::kDepth15W25um_mK).epsilon(1e-9));
    CHECK(series[0].aux_depth == 0.0);  // no second beam
    CHECK(series[2].depth == doctest::Approx(0.5 * series[0].depth).epsilon(1e-6));
    CHECK(series[2].mean_frequency ==
          doctest::Approx(std::sqrt(0.5) * series[0].mean_frequency).epsilon(1e-4));

    const odt::TrapConfig crossed = crossed_trap();
    const auto both = odt::trap_timeseries(crossed, crossed_hold(1.0, 1.0), grid);
    const double u0 = odt::dipole_coefficient(crossed.species, 1.06e-6) *
                      crossed.beams[1].peak_intensity();
    CHECK(both[0].aux_depth == doctest::Approx(u0).epsilon(1e-9));
    CHECK(both[0].depth > both[0].aux_depth);

    odt::PowerSchedule dark;
    dark.beams.resize(2);
    for (auto& segs : dark.beams) segs.push_back({0.0, 1.0, odt::RampKind::hold, 0.0, 0.0});
    CHECK_THROWS_AS(odt::trap_timeseries(crossed, dark, grid), odt::NoMinimumError);
}

TEST_CASE("trap timeline interpolates between characterization nodes") {
    const odt::TrapConfig trap = crossed_trap();
    const odt::TrapTimeline tl =
        odt::build_trap_timeline(trap, crossed_linear(1.0, 0.5, 1.0), 0.0, 1.0, 11);
    REQUIRE(tl.t.size() == 11);
    CHECK(tl.t.front() == 0.0);
    CHECK(tl.t.back() == 1.0);
    // Node values reproduce a direct characterization.
    const odt::TrapCharacterization chr0 = odt::characterize(trap);
    CHECK(tl.depth_at(0.0) == doctest::Approx(chr0.depth).epsilon(1e-9));
    CHECK(tl.u0_primary_at(0.0) ==
          doctest::Approx(chr0.single_beam_depth_U0).epsilon(1e-9));
    // Between nodes: linear in t, monotone along this ramp.
    const double mid = 0.5 * (tl.depth_at(tl.t[3]) + tl.depth_at(tl.t[4]));
    CHECK(tl.depth_at(0.5 * (tl.t[3] + tl.t[4])) == doctest::Approx(mid).epsilon(1e-12));
    CHECK(tl.depth_at(1.0) < tl.depth_at(0.0));
    // Clamped outside the schedule range.
    CHECK(tl.depth_at(-1.0) == tl.depth_at(0.0));
    CHECK(tl.depth_at(2.0) == tl.depth_at(1.0));
    CHECK(tl.primary_waist == doctest::Approx(40e-6).epsilon(1e-12));
    CHECK(tl.primary_wavelength == doctest::Approx(1.06e-6).epsilon(1e-12));
}
