#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace spdc {

// FNV-1a, 64 bit. Used for stable config and grid fingerprints in file names and headers.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::string_view bytes, int digits = 12);

// Shortest round-trip decimal text of a double, locale independent.
std::string format_double(double v);

}  // namespace spdc
