#pragma once

#include <cstdint>
#include <random>
#include <string>

namespace dmarket {

/// Shortest decimal text that round-trips the exact double value.
/// Used for every number that ends up in a log, CSV, or message body,
/// so that equal values always serialize to identical bytes.
std::string formatDouble(double value);

/// Parse a double previously produced by formatDouble (or any plain
/// decimal/scientific literal). Throws std::invalid_argument on junk.
double parseDouble(const std::string& text);

/// Deterministic random source. The generator is std::mt19937_64 but the
/// uniform and normal transforms are fixed here instead of delegating to
/// std::uniform_real_distribution / std::normal_distribution, whose output
/// sequences are implementation defined and would break reproducibility
/// across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53 random bits.
  double uniform01();

  /// Standard normal via Box-Muller. Consumes exactly two uniforms per
  /// call; nothing is cached between calls.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// Mixes an index into a base seed so derived streams are decorrelated but
/// reproducible from the base seed alone.
std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t index);

}  // namespace dmarket
