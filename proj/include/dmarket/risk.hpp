#pragma once

#include <vector>

namespace dmarket {

/// Full decomposition of one consumer's exposure for a single request.
struct RiskBreakdown {
  std::vector<double> normalizedCounts;    // subset count share per category
  std::vector<double> weighted;            // share times category weight
  std::vector<double> normalizedWeighted;  // weighted, renormalized to sum 1
  std::vector<double> perCategory;         // scaled by requested fraction
  double total = 0.0;                      // sum of perCategory
};

/// Quantifies revelation risk.
///
/// counts[i]  populated subsets in category i (all >= 1),
/// alpha[i]   requested subsets in category i (0 <= alpha[i] <= counts[i]),
/// weights[i] consumer's sensitivity for category i in [0, 1].
///
/// All three vectors must have the same nonzero length. If every weight is
/// zero the normalized weighted vector is defined as all zeros and the
/// total risk is 0. The total always lies in [0, 1] and equals 1 exactly
/// when the request covers the whole profile and some weight is positive.
///
/// Throws std::invalid_argument when a precondition fails.
RiskBreakdown quantifyRisk(const std::vector<int>& counts,
                           const std::vector<int>& alpha,
                           const std::vector<double>& weights);

}  // namespace dmarket
