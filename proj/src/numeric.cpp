#include "dmarket/numeric.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <system_error>

namespace dmarket {

std::string formatDouble(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) throw std::runtime_error("formatDouble failed");
  std::string text(buffer, ptr);
  // Integral values keep a decimal point so prices read "16.0", not "16".
  if (text.find_first_of(".eE") == std::string::npos &&
      text.find_first_not_of("-0123456789") == std::string::npos) {
    text += ".0";
  }
  return text;
}

double parseDouble(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number");
  const char* begin = text.c_str();
  char* end = nullptr;
  double value = std::strtod(begin, &end);
  if (end != begin + text.size()) {
    throw std::invalid_argument("bad number: " + text);
  }
  return value;
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  // Box-Muller, cosine branch only, so one call always consumes exactly
  // two engine outputs.
  double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
  double u2 = uniform01();
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t index) {
  return base + index * 0x9E3779B97F4A7C15ull;
}

}  // namespace dmarket
