#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "dmarket/numeric.hpp"
#include "dmarket/risk.hpp"

using namespace dmarket;

namespace {

// Closed form reached by cancelling the normalizations inside the
// pipeline: total = sum(alpha_i * w_i) / sum(count_i * w_i). Kept as an
// independent oracle; the production code never takes this shortcut.
double totalRiskOracle(const std::vector<int>& counts,
                       const std::vector<int>& alpha,
                       const std::vector<double>& weights) {
  long double num = 0.0L;
  long double den = 0.0L;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    num += static_cast<long double>(alpha[i]) * weights[i];
    den += static_cast<long double>(counts[i]) * weights[i];
  }
  if (den == 0.0L) return 0.0;
  return static_cast<double>(num / den);
}

}  // namespace

TEST_CASE("risk decomposition matches the worked two-consumer fixture") {
  const std::vector<int> counts{2, 2, 1};
  const std::vector<int> alpha{2, 1, 1};

  SUBCASE("first consumer") {
    RiskBreakdown b = quantifyRisk(counts, alpha, {0.1, 0.2, 0.2});
    REQUIRE(b.perCategory.size() == 3);
    CHECK(b.normalizedCounts[0] == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(b.normalizedCounts[2] == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(b.perCategory[0] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(b.perCategory[1] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(b.perCategory[2] == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(std::fabs(b.total - 0.75) <= 1e-9);
  }

  SUBCASE("second consumer") {
    RiskBreakdown b = quantifyRisk(counts, alpha, {0.4, 0.1, 0.5});
    CHECK(std::fabs(b.total - 14.0 / 15.0) <= 1e-9);
    CHECK(b.perCategory[0] == doctest::Approx(8.0 / 15.0).epsilon(1e-9));
    CHECK(b.perCategory[1] == doctest::Approx(1.0 / 15.0).epsilon(1e-9));
    CHECK(b.perCategory[2] == doctest::Approx(5.0 / 15.0).epsilon(1e-9));
  }
}

TEST_CASE("all-zero weights yield zero risk, not NaN") {
  RiskBreakdown b = quantifyRisk({2, 3}, {1, 2}, {0.0, 0.0});
  CHECK(b.total == 0.0);
  for (double v : b.normalizedWeighted) CHECK(v == 0.0);
  for (double v : b.perCategory) CHECK(v == 0.0);
}

TEST_CASE("full coverage with a positive weight exhausts the scale") {
  RiskBreakdown b = quantifyRisk({3, 1, 4}, {3, 1, 4}, {0.2, 0.0, 0.7});
  CHECK(std::fabs(b.total - 1.0) <= 1e-12);
}

TEST_CASE("empty request carries no risk") {
  RiskBreakdown b = quantifyRisk({2, 2, 1}, {0, 0, 0}, {0.3, 0.3, 0.4});
  CHECK(b.total == 0.0);
}

TEST_CASE("risk preconditions are enforced") {
  CHECK_THROWS_AS(quantifyRisk({}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({0, 1}, {0, 1}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({2, 1}, {3, 1}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({2, 1}, {-1, 1}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({2, 1}, {1, 1}, {-0.1, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({2, 1}, {1, 1}, {0.5, 1.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({2, 1}, {1}, {0.5, 0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(quantifyRisk({2, 1}, {1, 1}, {0.5}),
                  std::invalid_argument);
}

TEST_CASE("random cases agree with the closed-form oracle") {
  Rng rng(20260819);
  int checked = 0;
  for (int iter = 0; iter < 400; ++iter) {
    int n = 1 + static_cast<int>(rng.uniform01() * 6);
    std::vector<int> counts(n);
    std::vector<int> alpha(n);
    std::vector<double> weights(n);
    for (int i = 0; i < n; ++i) {
      counts[i] = 1 + static_cast<int>(rng.uniform01() * 5);
      alpha[i] = static_cast<int>(rng.uniform01() * (counts[i] + 1));
      if (alpha[i] > counts[i]) alpha[i] = counts[i];
      // Sprinkle exact zeros so the degenerate branch gets exercised.
      weights[i] = rng.uniform01() < 0.15 ? 0.0 : rng.uniform01();
    }

    RiskBreakdown b = quantifyRisk(counts, alpha, weights);
    double expected = totalRiskOracle(counts, alpha, weights);
    CHECK(std::fabs(b.total - expected) <= 1e-12);
    CHECK(b.total >= -1e-15);
    CHECK(b.total <= 1.0 + 1e-12);

    // Share vectors stay normalized whenever they are defined.
    double countShare = 0.0;
    for (double v : b.normalizedCounts) countShare += v;
    CHECK(std::fabs(countShare - 1.0) <= 1e-12);
    double weightShare = 0.0;
    bool anyWeight = false;
    for (double w : weights) anyWeight = anyWeight || w > 0.0;
    for (double v : b.normalizedWeighted) weightShare += v;
    if (anyWeight) {
      CHECK(std::fabs(weightShare - 1.0) <= 1e-12);
    } else {
      CHECK(weightShare == 0.0);
    }

    // Widening the request never lowers the total.
    std::vector<int> wider = alpha;
    bool widened = false;
    for (int i = 0; i < n; ++i) {
      if (wider[i] < counts[i]) {
        ++wider[i];
        widened = true;
        break;
      }
    }
    if (widened) {
      RiskBreakdown b2 = quantifyRisk(counts, wider, weights);
      CHECK(b2.total >= b.total - 1e-12);
    }
    ++checked;
  }
  CHECK(checked == 400);
}
