#include "dmarket/pipeline.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dmarket/numeric.hpp"
#include "dmarket/risk.hpp"

namespace dmarket {

namespace {

constexpr const char* kStageCategorization = "categorization";
constexpr const char* kStageTrust = "trust-assessment";
constexpr const char* kStageWeights = "weight-collection";
constexpr const char* kStageRisk = "risk-quantification";
constexpr const char* kStagePayoff = "payoff-quoting";
constexpr const char* kStageNegotiation = "negotiation";
constexpr const char* kStageOutcome = "outcome-notification";

constexpr const char* kFacilitator = "facilitator";
constexpr const char* kDatabase = "database";
constexpr const char* kTrust = "trust";
constexpr const char* kPayoff = "payoff";
constexpr const char* kConsumer = "consumer-negotiator";

std::string providerAgentName(const std::string& providerId) {
  return "provider:" + providerId;
}

bool startsWith(const std::string& text, const std::string& prefix) {
  return text.rfind(prefix, 0) == 0;
}

/// Blackboard shared by the session's agents. Messages carry the
/// coordination signals and the per-consumer risk values; bulk rows live
/// here so a two-thousand-member community does not get serialized into
/// message bodies.
struct Workspace {
  const Ontology* ontology = nullptr;
  const CredentialStore* credentials = nullptr;
  const std::vector<Account>* accounts = nullptr;

  SessionConfig config;
  std::string stage;
  std::vector<StageRecord> ledger;

  struct MemberProfile {
    std::string id;
    Profile profile;
    std::map<std::string, double> weights;
  };
  std::vector<MemberProfile> profiles;  // store mode only

  std::vector<std::string> memberIds;
  std::vector<double> psis;         // facilitator side
  std::vector<double> receivedPsis; // payoff agent side
  std::vector<QuoteEntry> quotes;

  PcrReport report;
  bool reportReady = false;

  SessionResult session;
  bool sessionReady = false;
  bool acceptedAll = false;

  bool done = false;

  void beginSession(const SessionConfig& newConfig) {
    config = newConfig;
    stage.clear();
    ledger.clear();
    profiles.clear();
    memberIds.clear();
    psis.clear();
    receivedPsis.clear();
    quotes.clear();
    report = PcrReport{};
    reportReady = false;
    session = SessionResult{};
    sessionReady = false;
    acceptedAll = false;
    done = false;
  }
};

class FacilitatorAgent : public Agent {
 public:
  explicit FacilitatorAgent(Workspace& ws) : ws_(ws), name_(kFacilitator) {}
  const std::string& name() const override { return name_; }

  void receive(const AclMessage& message, Registry& registry) override {
    const std::string& content = message.content;
    if (message.performative == Performative::Request &&
        content == "Start Market Session") {
      ws_.stage = kStageCategorization;
      send(registry, Performative::Inform, kDatabase, "Prepare Categorization");
      return;
    }
    if (startsWith(content, "Categorization Complete:")) {
      ws_.ledger.push_back(StageRecord{kStageCategorization, content});
      ws_.stage = kStageTrust;
      send(registry, Performative::Request, kTrust,
           "Trust Assessment:" + ws_.config.providerId);
      return;
    }
    if (startsWith(content, "PCR ")) {
      ws_.ledger.push_back(StageRecord{kStageTrust, content});
      ws_.stage = kStageWeights;
      std::string tag = ws_.config.synthetic ? "synthetic" : ws_.config.contextId;
      send(registry, Performative::Request, kDatabase, "Collect Risk Weights:" + tag);
      return;
    }
    if (startsWith(content, "Risk Weights Collected")) {
      ws_.ledger.push_back(StageRecord{kStageWeights, content});
      ws_.stage = kStageRisk;
      quantifyCommunityRisk();
      for (double psi : ws_.psis) {
        send(registry, Performative::Inform, kPayoff, formatDouble(psi));
      }
      ws_.ledger.push_back(
          StageRecord{kStageRisk, "Risk Quantification Complete:" +
                                      std::to_string(ws_.psis.size())});
      ws_.stage = kStagePayoff;
      double premium = expectedPremium(ws_.config.premium, ws_.config.premiumTime);
      send(registry, Performative::Request, kPayoff,
           "Quote Payoffs:" + formatDouble(premium));
      return;
    }
    if (startsWith(content, "Payoff Calculation Complete")) {
      ws_.ledger.push_back(StageRecord{kStagePayoff, content});
      ws_.stage = kStageNegotiation;
      send(registry, Performative::Inform, kConsumer, "Start Negotiation");
      return;
    }
    if (content == "Negotiation Terminated") {
      if (!ws_.sessionReady) {
        throw std::runtime_error("negotiation ended without a result");
      }
      std::string summary;
      if (ws_.session.outcome == SessionOutcome::Agreement) {
        summary = "Agreement price=" + formatDouble(ws_.session.agreedPrice) +
                  " records=" + std::to_string(ws_.session.agreedCount);
      } else {
        summary = "No Agreement";
      }
      ws_.ledger.push_back(StageRecord{kStageNegotiation, summary});
      ws_.stage = kStageOutcome;
      send(registry, Performative::Inform, kDatabase,
           "Negotiation Terminated: " + summary);
      ws_.ledger.push_back(StageRecord{kStageOutcome, "Negotiation Terminated"});
      ws_.done = true;
      return;
    }
    throw std::runtime_error("facilitator cannot handle: " + content);
  }

 private:
  void send(Registry& registry, Performative performative,
            const std::string& receiver, const std::string& content) {
    registry.send(AclMessage{performative, name_, {receiver},
                             ws_.config.conversationId, content});
  }

  void quantifyCommunityRisk() {
    ws_.memberIds.clear();
    ws_.psis.clear();
    if (ws_.config.synthetic) {
      Rng rng(ws_.config.seed);
      ws_.psis = sampleTruncatedNormal(*ws_.config.synthetic, rng);
      ws_.memberIds.reserve(ws_.psis.size());
      for (std::size_t i = 0; i < ws_.psis.size(); ++i) {
        ws_.memberIds.push_back("c" + std::to_string(i + 1));
      }
      return;
    }
    for (const auto& member : ws_.profiles) {
      std::vector<int> counts = member.profile.subsetCounts();
      std::vector<double> weights;
      weights.reserve(counts.size());
      for (const auto& category : member.profile.categories) {
        weights.push_back(member.weights.at(category.name));
      }
      RequestMatch match =
          matchRequest(*ws_.ontology, member.profile, ws_.config.requestFields);
      RiskBreakdown breakdown = quantifyRisk(counts, match.alpha, weights);
      ws_.memberIds.push_back(member.id);
      ws_.psis.push_back(breakdown.total);
    }
  }

  Workspace& ws_;
  std::string name_;
};

class DatabaseAgent : public Agent {
 public:
  explicit DatabaseAgent(Workspace& ws) : ws_(ws), name_(kDatabase) {}
  const std::string& name() const override { return name_; }

  void receive(const AclMessage& message, Registry& registry) override {
    const std::string& content = message.content;
    if (content == "Prepare Categorization") {
      std::size_t count = prepare();
      registry.send(AclMessage{Performative::Inform, name_, {kFacilitator},
                               ws_.config.conversationId,
                               "Categorization Complete:" + std::to_string(count)});
      return;
    }
    if (startsWith(content, "Collect Risk Weights:")) {
      if (!ws_.config.synthetic) collectWeights();
      std::string tag = content.substr(std::string("Collect Risk Weights:").size());
      registry.send(AclMessage{Performative::Inform, name_, {kFacilitator},
                               ws_.config.conversationId,
                               "Risk Weights Collected:" + tag});
      return;
    }
    if (startsWith(content, "Negotiation Terminated")) {
      return;  // outcome notice for the account holders; nothing to reply
    }
    throw std::runtime_error("database cannot handle: " + content);
  }

 private:
  std::size_t prepare() {
    if (ws_.config.synthetic) {
      if (ws_.config.synthetic->size <= 0) {
        throw std::runtime_error("empty population");
      }
      return static_cast<std::size_t>(ws_.config.synthetic->size);
    }
    if (ws_.accounts->empty()) {
      throw std::runtime_error("empty account store");
    }
    for (const auto& account : *ws_.accounts) {
      Profile profile = categorize(*ws_.ontology, account.fields);
      if (profile.categories.empty()) continue;
      ws_.profiles.push_back(
          Workspace::MemberProfile{account.consumerId, std::move(profile), {}});
    }
    if (ws_.profiles.empty()) {
      throw std::runtime_error("no categorizable accounts");
    }
    return ws_.profiles.size();
  }

  void collectWeights() {
    const std::string& context = ws_.config.contextId;
    std::map<std::string, const Account*> byId;
    for (const auto& account : *ws_.accounts) byId[account.consumerId] = &account;
    for (auto& member : ws_.profiles) {
      const Account* account = byId.at(member.id);
      auto it = account->riskWeights.find(context);
      if (it == account->riskWeights.end()) {
        throw std::runtime_error("consumer " + member.id +
                                 " has no weights for context " + context);
      }
      const auto& weights = it->second;
      for (const auto& category : member.profile.categories) {
        if (weights.find(category.name) == weights.end()) {
          throw std::runtime_error("consumer " + member.id +
                                   " is missing a weight for category " +
                                   category.name);
        }
      }
      if (weights.size() != member.profile.categories.size()) {
        for (const auto& [categoryName, value] : weights) {
          bool known = false;
          for (const auto& category : member.profile.categories) {
            if (category.name == categoryName) known = true;
          }
          if (!known) {
            throw std::runtime_error("consumer " + member.id +
                                     " has a weight for unknown category " +
                                     categoryName);
          }
        }
      }
      member.weights = weights;
    }
  }

  Workspace& ws_;
  std::string name_;
};

class TrustAgent : public Agent {
 public:
  explicit TrustAgent(Workspace& ws) : ws_(ws), name_(kTrust) {}
  const std::string& name() const override { return name_; }

  void receive(const AclMessage& message, Registry& registry) override {
    if (!startsWith(message.content, "Trust Assessment:")) {
      throw std::runtime_error("trust agent cannot handle: " + message.content);
    }
    std::string provider =
        message.content.substr(std::string("Trust Assessment:").size());
    ws_.report = buildReport(*ws_.credentials, provider);
    ws_.reportReady = true;
    registry.send(AclMessage{
        Performative::Inform, name_, {kFacilitator}, ws_.config.conversationId,
        "PCR stars=" + formatDouble(ws_.report.rating.stars) +
            " phi=" + formatDouble(ws_.report.rating.phi)});
  }

 private:
  Workspace& ws_;
  std::string name_;
};

class PayoffAgent : public Agent {
 public:
  explicit PayoffAgent(Workspace& ws) : ws_(ws), name_(kPayoff) {}
  const std::string& name() const override { return name_; }

  void receive(const AclMessage& message, Registry& registry) override {
    if (message.performative == Performative::Inform) {
      ws_.receivedPsis.push_back(parseDouble(message.content));
      return;
    }
    if (startsWith(message.content, "Quote Payoffs:")) {
      double premium = parseDouble(
          message.content.substr(std::string("Quote Payoffs:").size()));
      if (ws_.receivedPsis.size() != ws_.memberIds.size()) {
        throw std::runtime_error("risk value count mismatch");
      }
      ws_.quotes.clear();
      ws_.quotes.reserve(ws_.receivedPsis.size());
      for (std::size_t i = 0; i < ws_.receivedPsis.size(); ++i) {
        double psi = ws_.receivedPsis[i];
        ws_.quotes.push_back(
            QuoteEntry{ws_.memberIds[i], psi, expectedPayoff(psi, premium)});
      }
      registry.send(AclMessage{Performative::Inform, name_, {kFacilitator},
                               ws_.config.conversationId,
                               "Payoff Calculation Complete:" +
                                   std::to_string(ws_.quotes.size())});
      return;
    }
    throw std::runtime_error("payoff agent cannot handle: " + message.content);
  }

 private:
  Workspace& ws_;
  std::string name_;
};

class ConsumerNegotiatorAgent : public Agent {
 public:
  explicit ConsumerNegotiatorAgent(Workspace& ws) : ws_(ws), name_(kConsumer) {}
  const std::string& name() const override { return name_; }

  void receive(const AclMessage& message, Registry& registry) override {
    if (message.content == "Start Negotiation") {
      begin(registry);
      return;
    }
    if (message.performative == Performative::Propose) {
      onOffer(message, registry);
      return;
    }
    throw std::runtime_error("consumer negotiator cannot handle: " +
                             message.content);
  }

 private:
  void begin(Registry& registry) {
    population_.clear();
    for (const auto& quote : ws_.quotes) {
      population_.push_back(PopulationMember{quote.consumerId, quote.psi, quote.payoff});
    }
    round_ = 0;
    ws_.session = SessionResult{};
    providerName_ = providerAgentName(ws_.config.providerId);
    send(registry, Performative::Cfp, "Call for Proposal");
    ws_.session.events.push_back(SessionEvent{
        0, "CFP", name_, providerName_, "Call for Proposal", SessionState::S1});
  }

  void onOffer(const AclMessage& message, Registry& registry) {
    bool finalOffer = startsWith(message.content, "finalbidPR:");
    if (!finalOffer && !startsWith(message.content, "inbidPR:")) {
      throw std::runtime_error("malformed offer: " + message.content);
    }
    double price = parseDouble(
        message.content.substr(message.content.find(':') + 1));
    ++round_;
    ws_.session.events.push_back(SessionEvent{round_, "PROPOSE", providerName_,
                                              name_, message.content,
                                              SessionState::S2});

    const ConsumerParams& params = ws_.config.consumer;
    bool lastChance = finalOffer || round_ >= params.deadline;
    ConsumerDecision decision =
        consumerEvaluate(price, lastChance, round_, population_, params);
    ws_.session.offerCurve.push_back(
        OfferCurvePoint{round_, price, decision.count});
    ws_.session.rounds = round_;

    switch (decision.kind) {
      case DecisionKind::AcceptAll:
      case DecisionKind::AcceptSubset: {
        std::string content = "inbidCA:" + std::to_string(decision.count);
        send(registry, Performative::AcceptProposal, content);
        ws_.session.events.push_back(SessionEvent{
            round_, "ACCEPT-PROPOSAL", name_, providerName_, content,
            SessionState::S6});
        ws_.session.outcome = SessionOutcome::Agreement;
        ws_.session.agreedPrice = price;
        ws_.session.agreedCount = decision.count;
        ws_.acceptedAll = decision.kind == DecisionKind::AcceptAll;
        finish(registry);
        return;
      }
      case DecisionKind::Reject:
        send(registry, Performative::RejectProposal, "inbidCA:0");
        ws_.session.events.push_back(SessionEvent{round_, "REJECT-PROPOSAL",
                                                  name_, providerName_,
                                                  "inbidCA:0", SessionState::S5});
        ws_.session.outcome = SessionOutcome::Failure;
        finish(registry);
        return;
      case DecisionKind::Counter: {
        std::string content = "inbidCA:" + std::to_string(decision.count);
        send(registry, Performative::Propose, content);
        ws_.session.events.push_back(SessionEvent{
            round_, "PROPOSE", name_, providerName_, content, SessionState::S3});
        return;
      }
    }
  }

  void finish(Registry& registry) {
    ws_.sessionReady = true;
    registry.send(AclMessage{Performative::Inform, name_, {kFacilitator},
                             ws_.config.conversationId, "Negotiation Terminated"});
  }

  void send(Registry& registry, Performative performative,
            const std::string& content) {
    registry.send(AclMessage{performative, name_, {providerName_},
                             ws_.config.conversationId, content});
  }

  Workspace& ws_;
  std::string name_;
  std::string providerName_;
  Population population_;
  int round_ = 0;
};

class ProviderAgent : public Agent {
 public:
  ProviderAgent(Workspace& ws, const std::string& providerId)
      : ws_(ws), name_(providerAgentName(providerId)) {}
  const std::string& name() const override { return name_; }

  void receive(const AclMessage& message, Registry& registry) override {
    switch (message.performative) {
      case Performative::Cfp:
        round_ = 1;
        offer(registry);
        return;
      case Performative::Propose:
        ++round_;
        offer(registry);
        return;
      case Performative::AcceptProposal:
      case Performative::RejectProposal:
        return;  // terminal for the provider
      default:
        throw std::runtime_error("provider cannot handle: " + message.content);
    }
  }

 private:
  void offer(Registry& registry) {
    ProviderOffer next = providerNextOffer(round_, ws_.config.provider);
    std::string tag = next.final_ ? "finalbidPR:" : "inbidPR:";
    registry.send(AclMessage{Performative::Propose, name_, {kConsumer},
                             ws_.config.conversationId,
                             tag + formatDouble(next.price)});
  }

  Workspace& ws_;
  std::string name_;
  int round_ = 0;
};

}  // namespace

std::string toString(PaymentMode mode) {
  return mode == PaymentMode::Uniform ? "uniform" : "individual";
}

struct Marketplace::Impl {
  Ontology ontology;
  CredentialStore credentials;
  std::vector<Account> accounts;
  Workspace workspace;
  Registry registry;
};

Marketplace::Marketplace(Ontology ontology, CredentialStore credentials,
                         std::vector<Account> accounts)
    : impl_(std::make_unique<Impl>(Impl{std::move(ontology),
                                        std::move(credentials),
                                        std::move(accounts),
                                        {},
                                        {}})) {
  Workspace& ws = impl_->workspace;
  ws.ontology = &impl_->ontology;
  ws.credentials = &impl_->credentials;
  ws.accounts = &impl_->accounts;
  impl_->registry.add(std::make_unique<FacilitatorAgent>(ws));
  impl_->registry.add(std::make_unique<DatabaseAgent>(ws));
  impl_->registry.add(std::make_unique<TrustAgent>(ws));
  impl_->registry.add(std::make_unique<PayoffAgent>(ws));
  impl_->registry.add(std::make_unique<ConsumerNegotiatorAgent>(ws));
}

Marketplace::~Marketplace() = default;

PipelineResult Marketplace::runSession(const SessionConfig& config) {
  Workspace& ws = impl_->workspace;
  Registry& registry = impl_->registry;

  if (config.providerId.empty()) {
    throw PipelineError("setup", "no provider id");
  }
  if (config.provider.id != config.providerId) {
    throw PipelineError("setup", "provider params id does not match session provider");
  }
  ws.beginSession(config);

  std::string providerName = providerAgentName(config.providerId);
  if (!registry.has(providerName)) {
    registry.add(std::make_unique<ProviderAgent>(ws, config.providerId));
  }

  std::size_t expectedMembers = config.synthetic
                                    ? static_cast<std::size_t>(
                                          std::max(config.synthetic->size, 0))
                                    : impl_->accounts.size();
  std::size_t maxPasses = 2 * expectedMembers + 200 +
                          8 * static_cast<std::size_t>(std::max(
                                  config.consumer.deadline,
                                  config.provider.deadline));

  try {
    registry.send(AclMessage{Performative::Request, "user", {kFacilitator},
                             config.conversationId, "Start Market Session"});
    registry.runUntilIdle(maxPasses);
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(ws.stage.empty() ? "setup" : ws.stage, e.what());
  }
  if (!ws.done) {
    throw PipelineError(ws.stage.empty() ? "setup" : ws.stage, "pipeline stalled");
  }

  PipelineResult result;
  result.ledger = ws.ledger;
  result.report = ws.report;
  result.quotes = ws.quotes;
  result.session = ws.session;
  result.payment = config.payment;

  if (ws.session.outcome == SessionOutcome::Agreement) {
    double price = ws.session.agreedPrice;
    std::vector<std::pair<std::string, double>> accepted;
    for (const auto& quote : ws.quotes) {
      if (ws.acceptedAll || quote.payoff <= price) {
        // Joining above one's own quote only happens on a community-wide
        // accept; the recorded gain is then capped by the deal itself.
        accepted.emplace_back(quote.consumerId, std::min(quote.payoff, price));
      }
    }
    if (config.payment == PaymentMode::Uniform) {
      result.settlement = distributeSurplus(price, accepted);
      result.consumerBenefit = result.settlement->communityValue;
      result.providerBenefit =
          (config.provider.utility - price) * static_cast<double>(accepted.size());
    } else {
      double paidTotal = 0.0;
      for (const auto& [id, paid] : accepted) paidTotal += paid;
      result.consumerBenefit = paidTotal;
      result.providerBenefit =
          config.provider.utility * static_cast<double>(accepted.size()) - paidTotal;
    }
  }
  return result;
}

const MessageLog& Marketplace::log() const { return impl_->registry.log(); }

}  // namespace dmarket
