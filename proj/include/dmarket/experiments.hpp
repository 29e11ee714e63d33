#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dmarket/pipeline.hpp"

namespace dmarket {

struct DriftSweep {
  double from = 1.0;
  double to = 2.0;
  double step = 0.1;

  std::vector<double> points() const;
};

/// Couples a synthetic population's mean risk to the provider's star
/// rating: better-rated providers face less worried communities.
struct PcrCoupling {
  double meanBase = 0.95;
  double meanSlope = 0.12;
  double stddev = 0.15;

  double meanFor(double stars) const { return meanBase - meanSlope * stars; }
};

struct ExperimentConfig {
  int id = 1;
  std::uint64_t seed = 42;
  ConsumerParams consumer;
  ProviderParams provider;             // template; id swapped per provider
  std::vector<std::string> providers;  // experiments 3 and 4
  PopulationSpec population;
  bool couplePopulationToStars = false;
  PcrCoupling coupling;
  PremiumModel premium;
  double premiumTime = 1.0;
  PaymentMode payment = PaymentMode::Uniform;
  DriftSweep sweep;

  /// Canonical parameter set for experiments 1..4.
  static ExperimentConfig defaults(int id);
  static ExperimentConfig fromJsonFile(const std::string& path);
  static ExperimentConfig fromJsonText(const std::string& text);
};

struct ProviderOutcome {
  std::string provider;
  double stars = 0.0;
  double populationMean = 0.0;
  SessionOutcome outcome = SessionOutcome::Failure;
  double agreedPrice = 0.0;
  int transactions = 0;
  double consumerBenefit = 0.0;
  double providerBenefit = 0.0;
};

struct DriftPoint {
  std::string provider;
  double stars = 0.0;
  double drift = 0.0;
  double premium = 0.0;
  int transactions = 0;
  double consumerBenefit = 0.0;
  double providerBenefit = 0.0;
};

struct ExperimentResult {
  int id = 0;
  std::vector<ProviderOutcome> providerSummary;  // one row per session
  std::vector<DriftPoint> sweepPoints;           // experiment 4 only
  std::vector<SessionResult> sessions;
  std::vector<Settlement> settlements;           // uniform-mode agreements
  std::vector<std::string> writtenFiles;         // paths under outDir
};

/// Runs one experiment through the agent pipeline and writes its artifacts
/// (message_log.jsonl, manifest.json, and the applicable CSVs) under
/// outDir. outDir is created if needed; existing files are overwritten.
/// Outputs are byte-deterministic for a fixed config.
ExperimentResult runExperiment(const ExperimentConfig& config,
                               const Ontology& ontology,
                               const CredentialStore& credentials,
                               const std::vector<Account>& accounts,
                               const std::string& outDir);

}  // namespace dmarket
