#pragma once

#include <vector>

#include "odt/trap.hpp"

namespace odt {

enum class RampKind { hold, linear, exponential };

struct RampSegment {
    double t_start = 0.0;  // s
    double t_end = 0.0;    // s
    RampKind kind = RampKind::hold;
    double p_start = 0.0;  // W
    double p_end = 0.0;    // W
};

// Per-beam power ramps. A beam with no segments keeps its configured power.
struct PowerSchedule {
    std::vector<std::vector<RampSegment>> beams;

    // Throws std::invalid_argument on gaps/overlaps, negative powers, a
    // non-positive endpoint on an exponential ramp, or hold with p_end != p_start.
    void validate() const;

    double start_time() const;
    double end_time() const;

    // Power of one beam at time t; outside the covered range the nearest
    // endpoint's power applies. Beams without segments return fallback_power.
    double power_at(int beam, double t, double fallback_power) const;
};

// The trap with every beam's power taken from the schedule at time t.
TrapConfig trap_at_time(const TrapConfig& trap, const PowerSchedule& schedule, double t);

}  // namespace odt
