#include "dmarket/negotiation.hpp"

#include <cmath>
#include <stdexcept>

#include "dmarket/numeric.hpp"

namespace dmarket {

namespace {

[[noreturn]] void fail(const std::string& message) {
  throw std::invalid_argument("negotiation: " + message);
}

void validate(const ProviderParams& p) {
  if (!(p.reservationPrice > 0.0) || !(p.reservationPrice < p.utility)) {
    fail("provider needs 0 < reservation price < utility");
  }
  if (!(p.bidIncrement > 0.0)) fail("provider bid increment must be positive");
  if (p.deadline < 1) fail("provider deadline must be at least 1");
  if (!(p.initialFraction >= 0.0) || !(p.initialFraction <= 1.0)) {
    fail("provider initial fraction must lie in [0, 1]");
  }
}

void validate(const ConsumerParams& c) {
  if (!(c.reservationPrice > 0.0)) fail("consumer reservation price must be positive");
  if (!(c.initialPrice >= c.reservationPrice)) {
    fail("consumer initial price must not undercut its reservation price");
  }
  if (c.deadline < 1) fail("consumer deadline must be at least 1");
  if (!(c.eta > 0.0)) fail("consumer eta must be positive");
}

}  // namespace

double concessionPrice(double t, double deadline, double initialPrice,
                       double reservationPrice, double eta) {
  if (!(deadline > 0.0)) fail("deadline must be positive");
  if (!(eta > 0.0)) fail("eta must be positive");
  double clamped = std::min(std::max(t, 0.0), deadline);
  if (std::isinf(eta)) {
    // Sit and wait: no movement until the deadline itself.
    return clamped < deadline ? initialPrice : reservationPrice;
  }
  double progress = std::pow(clamped / deadline, eta);
  return initialPrice - progress * (initialPrice - reservationPrice);
}

ProviderOffer providerNextOffer(int t, const ProviderParams& params) {
  validate(params);
  if (t < 1 || t > params.deadline) fail("round outside [1, deadline]");
  ProviderOffer offer;
  if (t == params.deadline) {
    // Nothing left to wait for: concede to the reservation price.
    offer.price = params.reservationPrice;
    offer.final_ = true;
    return offer;
  }
  double scheduled =
      params.initialFraction * params.utility + (t - 1) * params.bidIncrement;
  if (scheduled >= params.reservationPrice) {
    offer.price = params.reservationPrice;
    offer.final_ = true;
  } else {
    offer.price = scheduled;
    offer.final_ = false;
  }
  return offer;
}

int demandAtPrice(const Population& population, double price) {
  int count = 0;
  for (const auto& member : population) {
    if (member.payoff <= price) ++count;
  }
  return count;
}

ConsumerDecision consumerEvaluate(double price, bool finalOffer, int round,
                                  const Population& population,
                                  const ConsumerParams& params) {
  validate(params);
  if (round < 1) fail("round must be at least 1");
  if (!(price >= 0.0)) fail("price must be non-negative");

  ConsumerDecision decision;
  decision.price = price;

  double threshold =
      concessionPrice(std::min(round, params.deadline), params.deadline,
                      params.initialPrice, params.reservationPrice, params.eta);
  if (price >= threshold) {
    decision.kind = DecisionKind::AcceptAll;
    decision.count = static_cast<int>(population.size());
    return decision;
  }
  int covered = demandAtPrice(population, price);
  if (finalOffer) {
    if (covered > 0) {
      decision.kind = DecisionKind::AcceptSubset;
      decision.count = covered;
    } else {
      decision.kind = DecisionKind::Reject;
      decision.count = 0;
    }
    return decision;
  }
  decision.kind = DecisionKind::Counter;
  decision.count = covered;
  return decision;
}

std::string toString(SessionState state) {
  switch (state) {
    case SessionState::Start: return "START";
    case SessionState::S1: return "S1";
    case SessionState::S2: return "S2";
    case SessionState::S3: return "S3";
    case SessionState::S5: return "S5";
    case SessionState::S6: return "S6";
    case SessionState::End: return "END";
  }
  return "?";
}

SessionResult runSession(const ProviderParams& provider,
                         const ConsumerParams& consumer,
                         const Population& population) {
  validate(provider);
  validate(consumer);

  SessionResult result;
  result.events.push_back(SessionEvent{0, "CFP", "consumer", "provider",
                                       "Call for Proposal", SessionState::S1});

  for (int t = 1;; ++t) {
    ProviderOffer offer = providerNextOffer(t, provider);
    bool lastChance = offer.final_ || t >= consumer.deadline;
    std::string offerTag = offer.final_ ? "finalbidPR:" : "inbidPR:";
    result.events.push_back(SessionEvent{t, "PROPOSE", "provider", "consumer",
                                         offerTag + formatDouble(offer.price),
                                         SessionState::S2});

    ConsumerDecision decision =
        consumerEvaluate(offer.price, lastChance, t, population, consumer);
    result.offerCurve.push_back(OfferCurvePoint{t, offer.price, decision.count});
    result.rounds = t;

    switch (decision.kind) {
      case DecisionKind::AcceptAll:
      case DecisionKind::AcceptSubset:
        result.events.push_back(
            SessionEvent{t, "ACCEPT-PROPOSAL", "consumer", "provider",
                         "inbidCA:" + std::to_string(decision.count),
                         SessionState::S6});
        result.outcome = SessionOutcome::Agreement;
        result.agreedPrice = offer.price;
        result.agreedCount = decision.count;
        return result;
      case DecisionKind::Reject:
        result.events.push_back(SessionEvent{t, "REJECT-PROPOSAL", "consumer",
                                             "provider", "inbidCA:0",
                                             SessionState::S5});
        result.outcome = SessionOutcome::Failure;
        return result;
      case DecisionKind::Counter:
        result.events.push_back(
            SessionEvent{t, "PROPOSE", "consumer", "provider",
                         "inbidCA:" + std::to_string(decision.count),
                         SessionState::S3});
        break;
    }
  }
}

}  // namespace dmarket
