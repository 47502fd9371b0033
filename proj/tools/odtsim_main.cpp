#include <CLI11.hpp>

#include "odt/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Optical dipole trap simulator: trap characterization, truncated-"
                 "Boltzmann wing populations, and evaporation trajectories"};
    app.require_subcommand(1);

    odt::CliOptions opts;
    auto add_common = [&](CLI::App* sub, bool sampling) {
        sub->add_option("--config", opts.config_path, "run configuration file")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "output directory (default from config)");
        if (sampling) {
            sub->add_option("--seed", opts.seed, "RNG seed override (0 = config value)");
            sub->add_option("--samples", opts.samples,
                            "Monte Carlo sample count override (0 = config value)");
            sub->add_option("--threads", opts.threads,
                            "worker threads (0 = hardware concurrency)");
        }
        sub->add_flag("--svg", opts.svg, "also write SVG plots");
    };

    CLI::App* trap = app.add_subcommand("trap", "characterize the trap and print a report");
    trap->add_option("--config", opts.config_path, "run configuration file")
        ->required()
        ->check(CLI::ExistingFile);

    CLI::App* wings = app.add_subcommand(
        "wings", "wing populations vs eta (volume table + analytic comparison)");
    add_common(wings, true);

    CLI::App* evolve = app.add_subcommand(
        "evolve", "integrate the evaporation trajectory over the power schedule");
    add_common(evolve, true);

    CLI::App* vtab =
        app.add_subcommand("vtab", "sample the equipotential volume table only");
    add_common(vtab, true);

    CLI11_PARSE(app, argc, argv);

    if (trap->parsed()) return odt::run_command([&] { return odt::cmd_trap(opts); });
    if (wings->parsed()) return odt::run_command([&] { return odt::cmd_wings(opts); });
    if (evolve->parsed()) return odt::run_command([&] { return odt::cmd_evolve(opts); });
    if (vtab->parsed()) return odt::run_command([&] { return odt::cmd_vtab(opts); });
    return 1;
}
