#include "odt/commands.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "odt/config.hpp"
#include "odt/constants.hpp"
#include "odt/csvio.hpp"
#include "odt/errors.hpp"
#include "odt/evap.hpp"
#include "odt/manifest.hpp"
#include "odt/svgplot.hpp"
#include "odt/thermo.hpp"
#include "odt/volume.hpp"

namespace odt {

namespace c = constants;

namespace {

struct Effective {
    RunConfig cfg;
    std::string config_text;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    int threads = 0;
    bool svg = false;
};

Effective load(const CliOptions& opts) {
    Effective e;
    e.config_text = read_text_file(opts.config_path);
    e.cfg = parse_config_text(e.config_text);
    e.out_dir = opts.out_dir.empty() ? e.cfg.output_dir : opts.out_dir;
    e.seed = opts.seed ? opts.seed : e.cfg.seed;
    e.samples = opts.samples ? opts.samples : e.cfg.samples;
    e.threads = opts.threads;
    e.svg = opts.svg || e.cfg.svg;
    return e;
}

std::string join(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir + "/" + name;
}

void write_manifest(const Effective& e, std::vector<std::string> outputs) {
    const RunManifest m = make_manifest(e.config_text, e.seed, e.samples, std::move(outputs));
    write_text_file(join(e.out_dir, "manifest.txt"), manifest_to_text(m));
}

double to_uK(double joules) { return joules / c::boltzmann * 1e6; }

int wavelength_nm(double wavelength) {
    return static_cast<int>(std::lround(wavelength * 1e9));
}

}  // namespace

int cmd_trap(const CliOptions& opts) {
    const Effective e = load(opts);
    const TrapConfig& trap = e.cfg.trap;

    std::printf("trap: %s\n", opts.config_path.c_str());
    std::printf("species: %s (m = %.6g kg, a = %.4g nm)\n", trap.species.name.c_str(),
                trap.species.mass, trap.species.scattering_length * 1e9);
    for (size_t i = 0; i < trap.beams.size(); ++i) {
        const GaussianBeam& b = trap.beams[i];
        std::printf("beam %zu: %.4g W, waists %.4g x %.4g um, wavelength %d nm\n", i,
                    b.power, b.waist_x * 1e6, b.waist_y * 1e6,
                    wavelength_nm(b.wavelength));
        std::printf("  axis (%.4g, %.4g, %.4g), focus (%.4g, %.4g, %.4g) m\n", b.axis.x,
                    b.axis.y, b.axis.z, b.focus.x, b.focus.y, b.focus.z);
        std::printf("  peak intensity %.6g W/m^2, Rayleigh ranges %.4g / %.4g mm\n",
                    b.peak_intensity(), b.rayleigh_x() * 1e3, b.rayleigh_y() * 1e3);
        const double u0 = dipole_coefficient(trap.species, b.wavelength) * b.peak_intensity();
        std::printf("  single-beam depth %.6g uK\n", to_uK(u0));
    }
    if (trap.gravity_enabled)
        std::printf("gravity: on (%.5g m/s^2)\n", trap.gravity_acceleration);

    const TrapCharacterization chr = characterize(trap);
    std::printf("minimum at (%.6g, %.6g, %.6g) m\n", chr.minimum_position.x,
                chr.minimum_position.y, chr.minimum_position.z);
    std::printf("potential at minimum %.6g uK\n", to_uK(chr.minimum_potential));
    std::printf("depth %.6g uK (%.6g J)\n", to_uK(chr.depth), chr.depth);
    std::printf("frequencies/2pi: %.6g, %.6g, %.6g Hz\n",
                chr.frequencies[0] / (2.0 * c::pi), chr.frequencies[1] / (2.0 * c::pi),
                chr.frequencies[2] / (2.0 * c::pi));
    std::printf("mean frequency/2pi: %.6g Hz\n", chr.mean_frequency / (2.0 * c::pi));
    std::printf("beta: %.6g\n", chr.beta);
    return 0;
}

int cmd_vtab(const CliOptions& opts) {
    const Effective e = load(opts);
    VolumeOptions vo;
    vo.bins = e.cfg.bins;
    vo.threads = e.threads;
    vo.max_rel_stderr = e.cfg.max_rel_stderr;

    std::printf("sampling volume table: beta %.4g, %llu samples, %d bins\n", e.cfg.beta,
                static_cast<unsigned long long>(e.samples), vo.bins);
    const VolumeTable table = volume_table(e.cfg.trap, e.cfg.beta, e.samples, e.seed, vo);

    const size_t last = table.u.size() - 1;
    std::printf("V(beta) = %.6g m^3 +/- %.3g%%\n", table.v[last],
                100.0 * table.v_stderr[last] / table.v[last]);

    const std::string path = join(e.out_dir, "vtable.csv");
    write_text_file(path, volume_table_to_csv(table));
    std::printf("wrote %s\n", path.c_str());
    write_manifest(e, {"vtable.csv"});
    return 0;
}

int cmd_wings(const CliOptions& opts) {
    const Effective e = load(opts);
    const RunConfig& cfg = e.cfg;
    if (cfg.trap.beams.empty()) throw std::invalid_argument("wings requires at least one beam");

    const TrapCharacterization chr = characterize(cfg.trap);
    VolumeOptions vo;
    vo.bins = cfg.bins;
    vo.threads = e.threads;
    vo.max_rel_stderr = cfg.max_rel_stderr;
    std::printf("sampling volume table: beta %.4g, %llu samples, %d bins\n", cfg.beta,
                static_cast<unsigned long long>(e.samples), vo.bins);
    const VolumeTable table = volume_table(cfg.trap, cfg.beta, e.samples, e.seed, vo);

    const GaussianBeam& primary = cfg.trap.beams[0];
    const double waist = std::sqrt(primary.waist_x * primary.waist_y);
    const double u0p = chr.single_beam_depth_U0;

    std::vector<double> etas;
    if (cfg.eta_steps < 2) {
        etas.push_back(cfg.eta_min);
    } else {
        for (int i = 0; i < cfg.eta_steps; ++i)
            etas.push_back(cfg.eta_min +
                           (cfg.eta_max - cfg.eta_min) * i / (cfg.eta_steps - 1));
    }

    std::string csv =
        "eta,wing_frac_analytic,wing_frac_exact,wing_frac_exact_err,"
        "n0_analytic_cm3,n0_exact_cm3,n0_exact_err\n";
    std::vector<double> wf_an, wf_ex;
    for (const double eta : etas) {
        const double T = u0p / (c::boltzmann * eta);
        TruncatedThermalState st = make_state(cfg.trap, chr, cfg.atoms, T);
        st.eta = eta;
        st.beta = cfg.beta;
        const PopulationReport ex = exact_populations(st, table, cfg.max_rel_err);
        const PopulationReport an = analytic_populations(
            cfg.atoms, eta, waist, primary.wavelength, &cfg.trap.species, T);
        std::printf("eta %.4g: wing fraction %.6g +/- %.2g (analytic %.6g), "
                    "n0 %.6g cm^-3 (analytic %.6g)\n",
                    eta, ex.wing_fraction, ex.wing_fraction_err, an.wing_fraction,
                    ex.n0 * 1e-6, an.n0 * 1e-6);
        csv += format_double(eta) + "," + format_double(an.wing_fraction) + "," +
               format_double(ex.wing_fraction) + "," + format_double(ex.wing_fraction_err) +
               "," + format_double(an.n0 * 1e-6) + "," + format_double(ex.n0 * 1e-6) + "," +
               format_double(ex.n0_err * 1e-6) + "\n";
        wf_an.push_back(an.wing_fraction);
        wf_ex.push_back(ex.wing_fraction);
    }

    const int nm = wavelength_nm(primary.wavelength);
    const std::string csv_name = "wings_" + std::to_string(nm) + "nm.csv";
    write_text_file(join(e.out_dir, csv_name), csv);
    std::printf("wrote %s\n", join(e.out_dir, csv_name).c_str());

    std::vector<std::string> outputs = {csv_name};
    if (e.svg) {
        const std::string svg_name = "wings_" + std::to_string(nm) + "nm.svg";
        std::vector<SvgSeries> series(2);
        series[0] = {etas, wf_an, "#1f6fb2", "closed form"};
        series[1] = {etas, wf_ex, "#d1495b", "Monte Carlo"};
        write_text_file(join(e.out_dir, svg_name),
                        svg_line_plot(series, "Wing population fraction, " +
                                      std::to_string(nm) + " nm",
                                      "eta", "wing fraction", true));
        outputs.push_back(svg_name);
    }
    write_manifest(e, std::move(outputs));
    return 0;
}

int cmd_evolve(const CliOptions& opts) {
    const Effective e = load(opts);
    const RunConfig& cfg = e.cfg;
    bool any_segment = false;
    for (const auto& beam : cfg.schedule.beams) any_segment |= !beam.empty();
    if (!any_segment)
        throw std::invalid_argument("evolve requires a [schedule] section with ramps");

    const double t0 = cfg.schedule.start_time();
    const TrapConfig trap0 = trap_at_time(cfg.trap, cfg.schedule, t0);
    const TrapCharacterization chr0 = characterize(trap0);
    const double T0 = cfg.initial_temperature > 0.0
                          ? cfg.initial_temperature
                          : chr0.depth / (10.0 * c::boltzmann);
    const TruncatedThermalState initial = make_state(trap0, chr0, cfg.initial_atoms, T0);
    std::printf("initial: N %.6g, T %.6g uK, depth %.6g uK, eta %.4g\n",
                initial.atom_number, T0 * 1e6, to_uK(chr0.depth),
                chr0.depth / (c::boltzmann * T0));

    std::vector<TrajectoryPoint> traj;
    bool collapsed = false;
    std::string collapse_what;
    try {
        traj = evolve(initial, cfg.trap, cfg.schedule, cfg.evap);
    } catch (const StateCollapseError& err) {
        traj = err.partial;
        collapsed = true;
        collapse_what = err.what();
        std::fprintf(stderr, "state collapse: %s\n", collapse_what.c_str());
    }

    std::string csv = "t,N,T_K,eta,depth_J,mean_freq_rad_s,n0_m3,psd,wing_fraction\n";
    for (const TrajectoryPoint& p : traj) {
        csv += format_double(p.t) + "," + format_double(p.atom_number) + "," +
               format_double(p.temperature) + "," + format_double(p.eta) + "," +
               format_double(p.depth) + "," + format_double(p.mean_frequency) + "," +
               format_double(p.n0) + "," + format_double(p.psd) + "," +
               format_double(p.wing_fraction) + "\n";
    }
    write_text_file(join(e.out_dir, "trajectory.csv"), csv);
    std::printf("wrote %s (%zu points)\n", join(e.out_dir, "trajectory.csv").c_str(),
                traj.size());

    // Trap properties on a coarser grid, from characterize() directly.
    const double t1 = cfg.schedule.end_time();
    std::vector<double> grid;
    const int series_points = 200;
    for (int i = 0; i <= series_points; ++i)
        grid.push_back(t0 + (t1 - t0) * i / series_points);
    const std::vector<TrapSeriesPoint> series = trap_timeseries(cfg.trap, cfg.schedule, grid);
    std::string tcsv = "t_s,combined_depth_uK,aux_depth_uK,mean_freq_Hz\n";
    for (const TrapSeriesPoint& p : series) {
        tcsv += format_double(p.t) + "," + format_double(to_uK(p.depth)) + "," +
                format_double(to_uK(p.aux_depth)) + "," +
                format_double(p.mean_frequency / (2.0 * c::pi)) + "\n";
    }
    write_text_file(join(e.out_dir, "trap_timeseries.csv"), tcsv);

    std::string summary;
    if (!traj.empty()) {
        const TrajectoryPoint& last = traj.back();
        // A trajectory cut short by collapse can be too brief for the slope
        // analysis; fall back to a bare peak scan so the summary still lands.
        StagnationReport stag;
        if (traj.size() >= 10) {
            stag = detect_stagnation(traj, cfg.trap.species);
        } else {
            size_t peak = 0;
            for (size_t i = 1; i < traj.size(); ++i)
                if (traj[i].psd > traj[peak].psd) peak = i;
            stag.peak_psd = traj[peak].psd;
            stag.peak_time = traj[peak].t;
            stag.collision_rate_at_peak =
                collision_rate(traj[peak].n0, traj[peak].temperature, cfg.trap.species);
        }
        double tc_cross = -1.0;
        for (const TrajectoryPoint& p : traj)
            if (p.degenerate) {
                tc_cross = p.t;
                break;
            }
        char buf[256];
        std::snprintf(buf, sizeof(buf), "points %zu\n", traj.size());
        summary += buf;
        std::snprintf(buf, sizeof(buf), "final t %.6g s\n", last.t);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "final N %.6g\n", last.atom_number);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "final T %.6g K\n", last.temperature);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "final eta %.6g\n", last.eta);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "final psd %.6g\n", last.psd);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "final wing fraction %.6g\n", last.wing_fraction);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "peak psd %.6g at t %.6g s\n", stag.peak_psd,
                      stag.peak_time);
        summary += buf;
        std::snprintf(buf, sizeof(buf), "collision rate at peak %.6g 1/s\n",
                      stag.collision_rate_at_peak);
        summary += buf;
        if (stag.stagnated) {
            std::snprintf(buf, sizeof(buf), "stagnated yes at t %.6g s\n", stag.time);
            summary += buf;
        } else {
            summary += "stagnated no\n";
        }
        if (tc_cross >= 0.0) {
            std::snprintf(buf, sizeof(buf), "condensation threshold crossed at t %.6g s\n",
                          tc_cross);
            summary += buf;
        } else {
            summary += "condensation threshold not crossed\n";
        }
        if (collapsed) summary += "state collapse: " + collapse_what + "\n";
        std::fputs(summary.c_str(), stdout);
    }
    write_text_file(join(e.out_dir, "summary.txt"), summary);

    std::vector<std::string> outputs = {"trajectory.csv", "trap_timeseries.csv",
                                        "summary.txt"};
    if (e.svg && !traj.empty()) {
        std::vector<double> ts, psds, ns;
        for (const TrajectoryPoint& p : traj) {
            ts.push_back(p.t);
            psds.push_back(p.psd);
            ns.push_back(p.atom_number);
        }
        std::vector<SvgSeries> s1(1), s2(1);
        s1[0] = {ts, psds, "#1f6fb2", ""};
        s2[0] = {ts, ns, "#d1495b", ""};
        write_text_file(join(e.out_dir, "psd_vs_time.svg"),
                        svg_line_plot(s1, "Phase-space density", "t (s)", "PSD", true));
        write_text_file(join(e.out_dir, "atoms_vs_time.svg"),
                        svg_line_plot(s2, "Atom number", "t (s)", "N", true));
        outputs.push_back("psd_vs_time.svg");
        outputs.push_back("atoms_vs_time.svg");
    }
    write_manifest(e, std::move(outputs));

    if (collapsed) throw StateCollapseError(collapse_what, std::move(traj));
    return 0;
}

int run_command(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& err) {
        std::fprintf(stderr, "config error: %s\n", err.what());
        return 1;
    } catch (const StateCollapseError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 4;
    } catch (const NoMinimumError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const DegenerateHessianError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    } catch (const BetaTooLargeError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 3;
    } catch (const ToleranceNotMetError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 3;
    } catch (const StiffnessError& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 3;
    } catch (const std::invalid_argument& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 1;
    }
}

}  // namespace odt
