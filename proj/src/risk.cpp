#include "dmarket/risk.hpp"

#include <stdexcept>
#include <string>

namespace dmarket {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("risk: " + message);
}

}  // namespace

RiskBreakdown quantifyRisk(const std::vector<int>& counts,
                           const std::vector<int>& alpha,
                           const std::vector<double>& weights) {
  const std::size_t n = counts.size();
  if (n == 0) fail("empty profile");
  if (alpha.size() != n || weights.size() != n) {
    fail("counts, alpha, and weights must have equal length");
  }

  double totalCount = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (counts[i] < 1) fail("category " + std::to_string(i) + " has no subsets");
    if (alpha[i] < 0 || alpha[i] > counts[i]) {
      fail("alpha out of range in category " + std::to_string(i));
    }
    if (!(weights[i] >= 0.0) || !(weights[i] <= 1.0)) {
      fail("weight out of range in category " + std::to_string(i));
    }
    totalCount += counts[i];
  }

  RiskBreakdown out;
  out.normalizedCounts.resize(n);
  out.weighted.resize(n);
  out.normalizedWeighted.resize(n);
  out.perCategory.resize(n);

  double weightedSum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.normalizedCounts[i] = counts[i] / totalCount;
    out.weighted[i] = out.normalizedCounts[i] * weights[i];
    weightedSum += out.weighted[i];
  }

  for (std::size_t i = 0; i < n; ++i) {
    // An indifferent consumer (all weights zero) carries zero exposure.
    out.normalizedWeighted[i] = weightedSum == 0.0 ? 0.0 : out.weighted[i] / weightedSum;
    out.perCategory[i] =
        (static_cast<double>(alpha[i]) / counts[i]) * out.normalizedWeighted[i];
    out.total += out.perCategory[i];
  }
  return out;
}

}  // namespace dmarket
