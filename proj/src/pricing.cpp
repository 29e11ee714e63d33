#include "dmarket/pricing.hpp"

#include <cmath>
#include <stdexcept>

namespace dmarket {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("pricing: " + message);
}

void validate(const PremiumModel& model) {
  if (!(model.initial > 0.0)) fail("initial premium must be positive");
  if (!(model.volatility >= 0.0)) fail("volatility must be non-negative");
  if (!std::isfinite(model.drift)) fail("drift must be finite");
}

}  // namespace

double expectedPremium(const PremiumModel& model, double t) {
  validate(model);
  if (!(t >= 0.0)) fail("time must be non-negative");
  return model.initial * std::exp(model.drift * t);
}

double samplePremium(const PremiumModel& model, double t, Rng& rng) {
  validate(model);
  if (!(t >= 0.0)) fail("time must be non-negative");
  double wiener = rng.normal() * std::sqrt(t);
  double exponent =
      (model.drift - 0.5 * model.volatility * model.volatility) * t +
      model.volatility * wiener;
  return model.initial * std::exp(exponent);
}

double expectedPayoff(double psi, double premium) {
  if (!(psi >= 0.0)) fail("risk must be non-negative");
  if (!(premium >= 0.0)) fail("premium must be non-negative");
  return psi * premium;
}

std::vector<QuoteEntry> quotePayoffs(
    const std::vector<std::pair<std::string, double>>& psis,
    const PremiumModel& model, double t) {
  double premium = expectedPremium(model, t);
  std::vector<QuoteEntry> quotes;
  quotes.reserve(psis.size());
  for (const auto& [id, psi] : psis) {
    quotes.push_back(QuoteEntry{id, psi, expectedPayoff(psi, premium)});
  }
  return quotes;
}

std::vector<double> sampleTruncatedNormal(const PopulationSpec& spec, Rng& rng) {
  if (spec.size < 0) fail("population size must be non-negative");
  if (!(spec.stddev >= 0.0)) fail("stddev must be non-negative");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(spec.size));
  if (spec.stddev == 0.0) {
    if (!(spec.mean >= 0.0) || !(spec.mean <= 1.0)) {
      fail("degenerate population needs mean in [0, 1]");
    }
    values.assign(static_cast<std::size_t>(spec.size), spec.mean);
    return values;
  }
  for (int i = 0; i < spec.size; ++i) {
    double draw;
    do {
      draw = spec.mean + spec.stddev * rng.normal();
    } while (draw < 0.0 || draw > 1.0);
    values.push_back(draw);
  }
  return values;
}

Settlement distributeSurplus(
    double unitPrice,
    const std::vector<std::pair<std::string, double>>& valuations) {
  if (!(unitPrice >= 0.0)) fail("unit price must be non-negative");

  Settlement settlement;
  settlement.unitPrice = unitPrice;
  settlement.communityValue = unitPrice * static_cast<double>(valuations.size());

  double total = 0.0;
  for (const auto& [id, valuation] : valuations) {
    if (!(valuation >= 0.0) || valuation > unitPrice + 1e-9) {
      fail("valuation outside [0, unit price] for " + id);
    }
    total += valuation;
  }
  settlement.totalValuation = total;
  settlement.surplus = settlement.communityValue - total;

  const std::size_t n = valuations.size();
  for (const auto& [id, valuation] : valuations) {
    double share;
    if (total == 0.0) {
      // Nobody claims an initial gain: share the surplus equally.
      share = n == 0 ? 0.0 : settlement.surplus / static_cast<double>(n);
    } else {
      share = valuation * settlement.surplus / total;
    }
    settlement.rows.push_back(SettlementRow{id, valuation, share, valuation + share});
  }
  return settlement;
}

}  // namespace dmarket
