#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace iforge {

inline constexpr std::string_view kToolVersion = "0.1.0";

// Full round-trip decimal formatting: 17 significant digits.
std::string format_double(double v);

std::uint64_t fnv1a64(std::string_view s);
std::string hex16(std::uint64_t v);

std::string iso8601_now();

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace iforge
