#pragma once

#include <string>
#include <string_view>

namespace avgkernel {

/// 17 significant digits, lowercase scientific, bare exponent: "1.3779347054049243e-1", "1.0000000000000000e0".
/// Locale-independent and round-trips exactly through parse_double.
std::string format_sci17(double value);

/// Fixed-point with the given number of decimals, locale-independent.
std::string format_fixed(double value, int decimals);

/// Shortest representation that round-trips.
std::string format_shortest(double value);

/// Parses the whole of text as a double; returns false on any trailing garbage.
bool parse_double(std::string_view text, double& value);

}  // namespace avgkernel
