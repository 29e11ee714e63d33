#pragma once

#include <string>
#include <vector>

#include "dmarket/numeric.hpp"

namespace dmarket {

/// Geometric Brownian motion parameters for the per-record risk premium.
struct PremiumModel {
  double initial = 50.0;    // premium at t = 0, must be > 0
  double drift = 0.0;
  double volatility = 0.0;  // must be >= 0
};

/// Expected premium at horizon t: initial * exp(drift * t). Independent of
/// volatility. Throws std::invalid_argument for t < 0 or bad parameters.
double expectedPremium(const PremiumModel& model, double t);

/// One simulated premium path endpoint:
/// initial * exp((drift - volatility^2 / 2) t + volatility * W_t)
/// with W_t normal, mean 0, variance t. Always positive; volatility 0
/// degenerates to the deterministic expected value.
double samplePremium(const PremiumModel& model, double t, Rng& rng);

/// A consumer's expected compensation: risk times expected premium.
double expectedPayoff(double psi, double premium);

struct QuoteEntry {
  std::string consumerId;
  double psi = 0.0;
  double payoff = 0.0;
};

std::vector<QuoteEntry> quotePayoffs(
    const std::vector<std::pair<std::string, double>>& psis,
    const PremiumModel& model, double t);

/// Synthetic risk population: normal(mean, stddev) truncated to [0, 1] by
/// rejection. stddev 0 yields the mean for every member.
struct PopulationSpec {
  int size = 2000;
  double mean = 0.6;
  double stddev = 0.25;
};

std::vector<double> sampleTruncatedNormal(const PopulationSpec& spec, Rng& rng);

struct SettlementRow {
  std::string consumerId;
  double valuation = 0.0;  // member's initial gain g
  double share = 0.0;      // member's slice of the surplus
  double payout = 0.0;     // valuation + share
};

/// Community settlement of an agreement at a uniform unit price.
struct Settlement {
  double unitPrice = 0.0;
  double communityValue = 0.0;   // unitPrice * member count
  double totalValuation = 0.0;   // sum of g
  double surplus = 0.0;          // communityValue - totalValuation
  std::vector<SettlementRow> rows;
};

/// Splits the surplus in proportion to each member's valuation (equal
/// split when all valuations are zero). Valuations must lie in
/// [0, unitPrice]; payouts sum to the community value exactly up to
/// floating point. Throws std::invalid_argument on a bad valuation.
Settlement distributeSurplus(
    double unitPrice,
    const std::vector<std::pair<std::string, double>>& valuations);

}  // namespace dmarket
