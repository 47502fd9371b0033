#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace odt {

// Options shared by every subcommand; zero/empty means "use the config value".
struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    int threads = 0;
    bool svg = false;
};

// Characterize the trap and print a report to stdout.
int cmd_trap(const CliOptions& opts);

// Volume table + wing populations over the configured eta grid; writes
// wings_<nm>nm.csv (analytic vs Monte Carlo columns) and a run manifest.
int cmd_wings(const CliOptions& opts);

// Integrate the evaporation kinetics over the configured power schedule;
// writes trajectory.csv, trap_timeseries.csv and summary.txt.
int cmd_evolve(const CliOptions& opts);

// Sample the equipotential volume table alone; writes vtable.csv.
int cmd_vtab(const CliOptions& opts);

// Runs a command body and maps failures to process exit codes:
//   1 bad config or arguments, 2 trap has no usable minimum,
//   3 numeric tolerance not met, 4 state collapse (partial output written).
int run_command(const std::function<int()>& body);

}  // namespace odt
