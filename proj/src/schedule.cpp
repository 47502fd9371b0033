#include "odt/schedule.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace odt {

void PowerSchedule::validate() const {
    for (size_t bi = 0; bi < beams.size(); ++bi) {
        const auto& segs = beams[bi];
        for (size_t i = 0; i < segs.size(); ++i) {
            const auto& s = segs[i];
            const std::string where =
                "beam " + std::to_string(bi) + " segment " + std::to_string(i);
            if (!(s.t_end > s.t_start))
                throw std::invalid_argument(where + ": t_end must exceed t_start");
            if (!(s.p_start >= 0.0) || !(s.p_end >= 0.0))
                throw std::invalid_argument(where + ": powers must be >= 0");
            if (s.kind == RampKind::exponential && (s.p_start <= 0.0 || s.p_end <= 0.0))
                throw std::invalid_argument(where +
                                            ": exponential ramp needs positive powers");
            if (s.kind == RampKind::hold && s.p_start != s.p_end)
                throw std::invalid_argument(where + ": hold segment powers must match");
            if (i > 0) {
                const double gap = s.t_start - segs[i - 1].t_end;
                if (std::abs(gap) > 1e-12 * std::max(1.0, std::abs(s.t_start)))
                    throw std::invalid_argument(where + ": segments must be contiguous");
            }
        }
    }
}

double PowerSchedule::start_time() const {
    double t = std::numeric_limits<double>::infinity();
    for (const auto& segs : beams)
        if (!segs.empty()) t = std::min(t, segs.front().t_start);
    return std::isfinite(t) ? t : 0.0;
}

double PowerSchedule::end_time() const {
    double t = -std::numeric_limits<double>::infinity();
    for (const auto& segs : beams)
        if (!segs.empty()) t = std::max(t, segs.back().t_end);
    return std::isfinite(t) ? t : 0.0;
}

double PowerSchedule::power_at(int beam, double t, double fallback_power) const {
    if (beam < 0 || static_cast<size_t>(beam) >= beams.size() ||
        beams[static_cast<size_t>(beam)].empty())
        return fallback_power;
    const auto& segs = beams[static_cast<size_t>(beam)];
    if (t <= segs.front().t_start) return segs.front().p_start;
    if (t >= segs.back().t_end) {
        const auto& s = segs.back();
        return s.kind == RampKind::hold ? s.p_start : s.p_end;
    }
    for (const auto& s : segs) {
        if (t > s.t_end) continue;
        const double x = (t - s.t_start) / (s.t_end - s.t_start);
        switch (s.kind) {
            case RampKind::hold:
                return s.p_start;
            case RampKind::linear:
                return s.p_start + (s.p_end - s.p_start) * x;
            case RampKind::exponential:
                return s.p_start * std::pow(s.p_end / s.p_start, x);
        }
    }
    return segs.back().p_end;
}

TrapConfig trap_at_time(const TrapConfig& trap, const PowerSchedule& schedule, double t) {
    TrapConfig out = trap;
    for (size_t i = 0; i < out.beams.size(); ++i)
        out.beams[i].power =
            schedule.power_at(static_cast<int>(i), t, out.beams[i].power);
    return out;
}

}  // namespace odt
