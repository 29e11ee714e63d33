#pragma once

#include <limits>
#include <string>
#include <vector>

namespace dmarket {

/// Time-dependent concession price at round t of T: the mover starts at
/// its initial price and concedes toward its reservation price following
/// (t / T)^eta. eta = infinity is the sit-and-wait tactic: hold the
/// initial price until the deadline, then concede fully.
double concessionPrice(double t, double deadline, double initialPrice,
                       double reservationPrice, double eta);

/// Buyer side. Offers ascend from initialFraction * utility by
/// bidIncrement per round, capped at reservationPrice; the offer at
/// t = deadline is forced to reservationPrice and flagged final.
struct ProviderParams {
  std::string id;
  double utility = 70.0;           // perceived value per record
  double reservationPrice = 35.0;  // ceiling per record
  int deadline = 6;
  double bidIncrement = 3.0;
  double initialFraction = 0.1;
};

/// Seller side (the consumer community). With initialPrice equal to
/// reservationPrice the acceptance threshold is flat at the reservation
/// price regardless of eta.
struct ConsumerParams {
  double initialPrice = 45.0;
  double reservationPrice = 45.0;
  int deadline = 10;
  double eta = std::numeric_limits<double>::infinity();
};

struct ProviderOffer {
  double price = 0.0;
  bool final_ = false;
};

/// The provider's offer at round t (1-based). Throws std::invalid_argument
/// if t is outside [1, deadline] or the params are invalid
/// (0 < reservationPrice < utility, bidIncrement > 0 required).
ProviderOffer providerNextOffer(int t, const ProviderParams& params);

struct PopulationMember {
  std::string id;
  double psi = 0.0;
  double payoff = 0.0;  // quoted per-record compensation
};

using Population = std::vector<PopulationMember>;

/// Number of members whose quoted payoff the price covers.
int demandAtPrice(const Population& population, double price);

enum class DecisionKind { AcceptAll, AcceptSubset, Counter, Reject };

struct ConsumerDecision {
  DecisionKind kind = DecisionKind::Reject;
  int count = 0;      // records committed (population size for AcceptAll)
  double price = 0.0; // offer being answered
};

/// Community reply to a provider offer. Accept everything once the offer
/// reaches the community's concession threshold at round t; on a final
/// offer accept the covered sub-community, or reject if it is empty;
/// otherwise counter with the covered record count.
ConsumerDecision consumerEvaluate(double price, bool finalOffer, int round,
                                  const Population& population,
                                  const ConsumerParams& params);

enum class SessionState { Start, S1, S2, S3, S5, S6, End };

std::string toString(SessionState state);

struct SessionEvent {
  int round = 0;  // 0 for the opening call
  std::string performative;
  std::string sender;
  std::string receiver;
  std::string content;
  SessionState stateAfter = SessionState::Start;
};

enum class SessionOutcome { Agreement, Failure };

struct OfferCurvePoint {
  int round = 0;
  double providerOffer = 0.0;
  int consumerCount = 0;
};

struct SessionResult {
  SessionOutcome outcome = SessionOutcome::Failure;
  double agreedPrice = 0.0;
  int agreedCount = 0;
  int rounds = 0;  // provider offers made
  std::vector<OfferCurvePoint> offerCurve;
  std::vector<SessionEvent> events;
};

/// Runs one bilateral session to completion. One round is one provider
/// offer plus the community's reply; the consumer treats the offer at its
/// own deadline as final, so the session always terminates within
/// max(consumer deadline, provider deadline) + 1 rounds.
SessionResult runSession(const ProviderParams& provider,
                         const ConsumerParams& consumer,
                         const Population& population);

}  // namespace dmarket
