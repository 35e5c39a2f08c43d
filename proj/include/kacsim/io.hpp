#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace kac {

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t x);
// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace kac
