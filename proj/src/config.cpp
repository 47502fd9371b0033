#include "odt/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "odt/csvio.hpp"
#include "odt/errors.hpp"
#include "odt/species.hpp"

namespace odt {

namespace {

struct Token {
    std::string text;
    int line = 0;
    int col = 0;
};

struct KeyValue {
    Token key;
    Token value;
};

struct Section {
    Token name;
    std::vector<KeyValue> entries;
};

std::vector<Section> tokenize(const std::string& text) {
    std::vector<Section> sections;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        const std::string body = line.substr(first, last - first + 1);
        const int col = static_cast<int>(first) + 1;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError("unterminated section header", lineno, col);
            sections.push_back({Token{body.substr(1, body.size() - 2), lineno, col}, {}});
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", lineno, col);
        auto strip = [&](std::string s, int offset) -> Token {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            if (a == std::string::npos)
                throw ConfigError("empty key or value", lineno, col + offset);
            return {s.substr(a, b - a + 1), lineno, col + offset + static_cast<int>(a)};
        };
        if (sections.empty())
            throw ConfigError("key outside any [section]", lineno, col);
        sections.back().entries.push_back(
            {strip(body.substr(0, eq), 0), strip(body.substr(eq + 1), static_cast<int>(eq) + 1)});
    }
    return sections;
}

double to_double(const Token& t) {
    try {
        return parse_double(t.text);
    } catch (const std::exception&) {
        throw ConfigError("expected a number, got '" + t.text + "'", t.line, t.col);
    }
}

std::uint64_t to_u64(const Token& t) {
    std::uint64_t v = 0;
    const char* first = t.text.data();
    const char* last = first + t.text.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec == std::errc{} && res.ptr == last) return v;
    // Accept scientific notation for counts (e.g. samples = 1e7).
    const double d = to_double(t);
    if (d < 0.0 || d != std::floor(d) || d > 1.8e19)
        throw ConfigError("expected a non-negative integer, got '" + t.text + "'", t.line,
                          t.col);
    return static_cast<std::uint64_t>(d);
}

int to_int(const Token& t) {
    const double d = to_double(t);
    if (d != std::floor(d) || std::abs(d) > 2e9)
        throw ConfigError("expected an integer, got '" + t.text + "'", t.line, t.col);
    return static_cast<int>(d);
}

bool to_flag(const Token& t) {
    if (t.text == "on" || t.text == "true" || t.text == "yes" || t.text == "1") return true;
    if (t.text == "off" || t.text == "false" || t.text == "no" || t.text == "0")
        return false;
    throw ConfigError("expected on/off, got '" + t.text + "'", t.line, t.col);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream ss(s);
    std::string w;
    while (ss >> w) out.push_back(w);
    return out;
}

Vec3 to_vec3(const Token& t) {
    const auto parts = split_ws(t.text);
    if (parts.size() != 3)
        throw ConfigError("expected three numbers, got '" + t.text + "'", t.line, t.col);
    try {
        return {parse_double(parts[0]), parse_double(parts[1]), parse_double(parts[2])};
    } catch (const std::exception&) {
        throw ConfigError("expected three numbers, got '" + t.text + "'", t.line, t.col);
    }
}

Vec3 default_transverse(const Vec3& axis) {
    const Vec3 ref = std::abs(axis.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    return ref.cross(axis).normalized();
}

RampSegment to_segment(const Token& t, int& beam_index) {
    const auto parts = split_ws(t.text);
    if (parts.size() != 6)
        throw ConfigError(
            "expected 'seg = <beam> <t0> <t1> <hold|lin|exp> <P0> <P1>', got '" + t.text +
                "'",
            t.line, t.col);
    try {
        beam_index = static_cast<int>(parse_double(parts[0]));
        RampSegment seg;
        seg.t_start = parse_double(parts[1]);
        seg.t_end = parse_double(parts[2]);
        if (parts[3] == "hold")
            seg.kind = RampKind::hold;
        else if (parts[3] == "lin" || parts[3] == "linear")
            seg.kind = RampKind::linear;
        else if (parts[3] == "exp" || parts[3] == "exponential")
            seg.kind = RampKind::exponential;
        else
            throw std::invalid_argument("kind");
        seg.p_start = parse_double(parts[4]);
        seg.p_end = parse_double(parts[5]);
        return seg;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        throw ConfigError("malformed schedule segment '" + t.text + "'", t.line, t.col);
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    cfg.trap.species = rubidium87();

    for (const auto& section : tokenize(text)) {
        const std::string& name = section.name.text;
        if (name == "species") {
            for (const auto& kv : section.entries) {
                const std::string& k = kv.key.text;
                if (k == "name") {
                    if (kv.value.text == "Rb87" || kv.value.text == "87Rb")
                        cfg.trap.species = rubidium87();
                    else
                        throw ConfigError("unknown species '" + kv.value.text + "'",
                                          kv.value.line, kv.value.col);
                } else if (k == "scattering_length") {
                    cfg.trap.species.scattering_length = to_double(kv.value);
                } else if (k == "three_body_K3") {
                    cfg.trap.species.three_body_K3 = to_double(kv.value);
                } else {
                    throw ConfigError("unknown key '" + k + "' in [species]", kv.key.line,
                                      kv.key.col);
                }
            }
        } else if (name == "beam") {
            GaussianBeam beam;
            beam.wavelength = 1.064e-6;
            bool has_tx = false;
            for (const auto& kv : section.entries) {
                const std::string& k = kv.key.text;
                if (k == "power")
                    beam.power = to_double(kv.value);
                else if (k == "waist") {
                    beam.waist_x = beam.waist_y = to_double(kv.value);
                } else if (k == "waist_x")
                    beam.waist_x = to_double(kv.value);
                else if (k == "waist_y")
                    beam.waist_y = to_double(kv.value);
                else if (k == "wavelength")
                    beam.wavelength = to_double(kv.value);
                else if (k == "axis")
                    beam.axis = to_vec3(kv.value).normalized();
                else if (k == "transverse_x") {
                    beam.transverse_x = to_vec3(kv.value).normalized();
                    has_tx = true;
                } else if (k == "focus")
                    beam.focus = to_vec3(kv.value);
                else
                    throw ConfigError("unknown key '" + k + "' in [beam]", kv.key.line,
                                      kv.key.col);
            }
            if (!has_tx) beam.transverse_x = default_transverse(beam.axis);
            try {
                beam.validate();
            } catch (const std::exception& e) {
                throw ConfigError(std::string("invalid beam: ") + e.what(),
                                  section.name.line, section.name.col);
            }
            cfg.trap.beams.push_back(beam);
        } else if (name == "trap") {
            for (const auto& kv : section.entries) {
                const std::string& k = kv.key.text;
                if (k == "gravity")
                    cfg.trap.gravity_enabled = to_flag(kv.value);
                else if (k == "gravity_acceleration")
                    cfg.trap.gravity_acceleration = to_double(kv.value);
                else
                    throw ConfigError("unknown key '" + k + "' in [trap]", kv.key.line,
                                      kv.key.col);
            }
            if (cfg.trap.gravity_enabled && cfg.trap.gravity_acceleration == 0.0)
                cfg.trap.gravity_acceleration = 9.80665;
        } else if (name == "thermo") {
            for (const auto& kv : section.entries) {
                const std::string& k = kv.key.text;
                if (k == "beta")
                    cfg.beta = to_double(kv.value);
                else if (k == "eta_min")
                    cfg.eta_min = to_double(kv.value);
                else if (k == "eta_max")
                    cfg.eta_max = to_double(kv.value);
                else if (k == "eta_steps")
                    cfg.eta_steps = to_int(kv.value);
                else if (k == "atoms")
                    cfg.atoms = to_double(kv.value);
                else if (k == "samples")
                    cfg.samples = to_u64(kv.value);
                else if (k == "seed")
                    cfg.seed = to_u64(kv.value);
                else if (k == "bins")
                    cfg.bins = to_int(kv.value);
                else if (k == "max_rel_err")
                    cfg.max_rel_err = to_double(kv.value);
                else if (k == "max_rel_stderr")
                    cfg.max_rel_stderr = to_double(kv.value);
                else
                    throw ConfigError("unknown key '" + k + "' in [thermo]", kv.key.line,
                                      kv.key.col);
            }
        } else if (name == "schedule") {
            for (const auto& kv : section.entries) {
                if (kv.key.text != "seg")
                    throw ConfigError("unknown key '" + kv.key.text + "' in [schedule]",
                                      kv.key.line, kv.key.col);
                int beam_index = 0;
                const RampSegment seg = to_segment(kv.value, beam_index);
                if (beam_index < 0 || beam_index >= 16)
                    throw ConfigError("schedule beam index out of range", kv.value.line,
                                      kv.value.col);
                if (cfg.schedule.beams.size() <= static_cast<size_t>(beam_index))
                    cfg.schedule.beams.resize(static_cast<size_t>(beam_index) + 1);
                cfg.schedule.beams[static_cast<size_t>(beam_index)].push_back(seg);
            }
        } else if (name == "evap") {
            for (const auto& kv : section.entries) {
                const std::string& k = kv.key.text;
                if (k == "background_lifetime")
                    cfg.evap.background_lifetime = to_double(kv.value);
                else if (k == "three_body_K3")
                    cfg.evap.three_body_K3 = to_double(kv.value);
                else if (k == "ode_rel_tol")
                    cfg.evap.ode_rel_tol = to_double(kv.value);
                else if (k == "ode_abs_tol")
                    cfg.evap.ode_abs_tol = to_double(kv.value);
                else if (k == "evaporation_rate_scale")
                    cfg.evap.evaporation_rate_scale = to_double(kv.value);
                else if (k == "adiabatic_cap_fraction")
                    cfg.evap.adiabatic_cap_fraction = to_double(kv.value);
                else if (k == "timeline_points")
                    cfg.evap.timeline_points = to_int(kv.value);
                else if (k == "initial_atoms")
                    cfg.initial_atoms = to_double(kv.value);
                else if (k == "initial_temperature")
                    cfg.initial_temperature = to_double(kv.value);
                else
                    throw ConfigError("unknown key '" + k + "' in [evap]", kv.key.line,
                                      kv.key.col);
            }
        } else if (name == "output") {
            for (const auto& kv : section.entries) {
                const std::string& k = kv.key.text;
                if (k == "dir")
                    cfg.output_dir = kv.value.text;
                else if (k == "svg")
                    cfg.svg = to_flag(kv.value);
                else
                    throw ConfigError("unknown key '" + k + "' in [output]", kv.key.line,
                                      kv.key.col);
            }
        } else {
            throw ConfigError("unknown section [" + name + "]", section.name.line,
                              section.name.col);
        }
    }

    if (cfg.trap.beams.empty())
        throw ConfigError("config defines no [beam] section", 1, 1);
    try {
        cfg.schedule.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid schedule: ") + e.what(), 1, 1);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    return parse_config_text(read_text_file(path));
}

}  // namespace odt
