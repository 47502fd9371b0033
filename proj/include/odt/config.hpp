#pragma once

#include <cstdint>
#include <string>

#include "odt/evap.hpp"
#include "odt/schedule.hpp"
#include "odt/trap.hpp"

namespace odt {

// A full run description parsed from an INI-style config file. Sections:
// [species], [beam] (repeated, order defines indices), [trap], [thermo],
// [schedule], [evap], [output]. Unknown sections or keys are rejected with
// the line and column of the offender.
struct RunConfig {
    TrapConfig trap;

    // [thermo]
    double beta = 1.9;
    double eta_min = 6.0;
    double eta_max = 12.0;
    int eta_steps = 7;
    double atoms = 2e6;
    std::uint64_t samples = 1000000;
    std::uint64_t seed = 1;
    int bins = 400;
    double max_rel_err = 0.005;       // populations normalization tolerance
    double max_rel_stderr = 0.05;     // volume-table interior-bin tolerance

    // [schedule] / [evap]
    PowerSchedule schedule;
    EvapModelParams evap;
    double initial_atoms = 4e6;
    // K; <= 0 selects depth/(10 k_b) at the schedule start (eta = 10).
    double initial_temperature = 0.0;

    // [output]
    std::string output_dir = "out";
    bool svg = false;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace odt
