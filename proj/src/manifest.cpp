#include "odt/manifest.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <ctime>

namespace odt {

std::uint64_t fnv1a_hash(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char byte : data) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RunManifest make_manifest(const std::string& config_text, std::uint64_t seed,
                          std::uint64_t samples, std::vector<std::string> outputs) {
    RunManifest m;
    m.config_hash = fnv1a_hash(config_text);
    m.seed = seed;
    m.samples = samples;
    m.outputs = std::move(outputs);
    const std::time_t now = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    m.timestamp = buf;
    return m;
}

std::string manifest_to_text(const RunManifest& manifest) {
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016" PRIx64, manifest.config_hash);
    std::string out;
    out += "tool_version=" + manifest.tool_version + "\n";
    out += "config_hash=" + std::string(hash) + "\n";
    out += "seed=" + std::to_string(manifest.seed) + "\n";
    out += "samples=" + std::to_string(manifest.samples) + "\n";
    out += "timestamp=" + manifest.timestamp + "\n";
    for (const auto& f : manifest.outputs) out += "output=" + f + "\n";
    return out;
}

}  // namespace odt
