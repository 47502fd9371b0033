#pragma once

#include <string>
#include <vector>

namespace odt {

// Shortest round-trip decimal form of a double (std::to_chars): locale-free
// and byte-identical across runs, so CSV outputs can be compared bytewise.
std::string format_double(double value);

// Strict double parse of a whole token; throws std::invalid_argument.
double parse_double(const std::string& token);

// Splits CSV text into rows of comma-separated trimmed tokens; skips blank
// lines. No quoting support — the tool never emits quoted fields.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

// Writes text to a file, creating parent directories; throws on failure.
void write_text_file(const std::string& path, const std::string& content);

std::string read_text_file(const std::string& path);

}  // namespace odt
