#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace odt {

inline constexpr const char* kToolVersion = "odtsim 1.0.0";

std::uint64_t fnv1a_hash(const std::string& data);

// Flat key=value run record. The timestamp lives only here — data files must
// stay byte-identical across reruns.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::string timestamp;  // UTC, filled by make_manifest
    std::vector<std::string> outputs;
};

RunManifest make_manifest(const std::string& config_text, std::uint64_t seed,
                          std::uint64_t samples, std::vector<std::string> outputs);

std::string manifest_to_text(const RunManifest& manifest);

}  // namespace odt
