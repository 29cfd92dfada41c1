#include "avgkernel/format.hpp"

#include <array>
#include <charconv>
#include <system_error>

namespace avgkernel {

std::string format_sci17(double value) {
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                    std::chars_format::scientific, 16);
  std::string text(buffer.data(), result.ptr);
  const auto e = text.find('e');
  if (e == std::string::npos) return text;  // inf / nan
  std::string exponent = text.substr(e + 1);
  bool negative = false;
  std::size_t start = 0;
  if (!exponent.empty() && (exponent[0] == '+' || exponent[0] == '-')) {
    negative = exponent[0] == '-';
    start = 1;
  }
  while (start + 1 < exponent.size() && exponent[start] == '0') ++start;
  return text.substr(0, e + 1) + (negative ? "-" : "") + exponent.substr(start);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 512> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value,
                                    std::chars_format::fixed, decimals);
  if (result.ec != std::errc{}) return format_sci17(value);
  std::string text(buffer.data(), result.ptr);
  // "-0.0000" reads badly in a table.
  if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) text.erase(0, 1);
  return text;
}

std::string format_shortest(double value) {
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

bool parse_double(std::string_view text, double& value) {
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto result = std::from_chars(first, last, value);
  return result.ec == std::errc{} && result.ptr == last;
}

}  // namespace avgkernel
