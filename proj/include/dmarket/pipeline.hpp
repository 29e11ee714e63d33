#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dmarket/agents.hpp"
#include "dmarket/negotiation.hpp"
#include "dmarket/ontology.hpp"
#include "dmarket/pricing.hpp"
#include "dmarket/rating.hpp"

namespace dmarket {

enum class PaymentMode { Uniform, Individual };

std::string toString(PaymentMode mode);

/// Market task for one provider request, run end to end through the agent
/// pipeline. The risk population comes either from the account store (a
/// request matched against every stored profile under the given context's
/// weights) or from a sampled synthetic population.
struct SessionConfig {
  std::string providerId;
  ProviderParams provider;
  ConsumerParams consumer;
  PremiumModel premium;
  double premiumTime = 1.0;
  PaymentMode payment = PaymentMode::Uniform;
  std::uint64_t seed = 0;
  std::string conversationId = "session";

  std::optional<PopulationSpec> synthetic;

  // Store mode (used when synthetic is empty).
  std::string contextId;
  std::vector<std::string> requestFields;
};

struct StageRecord {
  std::string stage;
  std::string result;
};

/// Raised when a stage cannot complete; carries the stage name for
/// diagnostics.
class PipelineError : public std::runtime_error {
 public:
  PipelineError(std::string stage, const std::string& message)
      : std::runtime_error("error at stage " + stage + ": " + message),
        stage_(std::move(stage)) {}

  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct PipelineResult {
  std::vector<StageRecord> ledger;
  PcrReport report;
  std::vector<QuoteEntry> quotes;
  SessionResult session;
  PaymentMode payment = PaymentMode::Uniform;

  // Uniform mode, agreement reached: community settlement at the agreed
  // price. Otherwise empty.
  std::optional<Settlement> settlement;

  // Benefit totals over the transacted records. Uniform mode pays the
  // agreed price per record; individual mode pays each member its quote.
  double consumerBenefit = 0.0;
  double providerBenefit = 0.0;
};

/// Owns the agent registry, the shared stores, and one message log that
/// spans every session run through it.
class Marketplace {
 public:
  Marketplace(Ontology ontology, CredentialStore credentials,
              std::vector<Account> accounts);
  ~Marketplace();

  Marketplace(const Marketplace&) = delete;
  Marketplace& operator=(const Marketplace&) = delete;

  /// Runs the seven-stage pipeline: categorization, trust-assessment,
  /// weight-collection, risk-quantification, payoff-quoting, negotiation,
  /// outcome-notification. Throws PipelineError on any failure.
  PipelineResult runSession(const SessionConfig& config);

  const MessageLog& log() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dmarket
