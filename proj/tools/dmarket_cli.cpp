#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dmarket/experiments.hpp"
#include "dmarket/numeric.hpp"
#include "dmarket/pipeline.hpp"
#include "dmarket/risk.hpp"

#ifndef DMARKET_DATA_DIR
#define DMARKET_DATA_DIR "data"
#endif

namespace {

using namespace dmarket;

struct GlobalOptions {
  std::uint64_t seed = 42;
  bool seedGiven = false;
  std::string configPath;
  std::string outDir;
  std::string dataDir = DMARKET_DATA_DIR;
  std::string accountsPath;
  std::string credentialsPath;
  std::string ontologyPath;

  std::string accounts() const {
    return accountsPath.empty() ? dataDir + "/accounts.jsonl" : accountsPath;
  }
  std::string credentials() const {
    return credentialsPath.empty() ? dataDir + "/credentials.csv" : credentialsPath;
  }
  std::string ontology() const {
    return ontologyPath.empty() ? dataDir + "/ontology.json" : ontologyPath;
  }
  std::string experimentProviders() const {
    return dataDir + "/experiment_providers.csv";
  }
};

CredentialStore loadCredentials(const GlobalOptions& options, bool withFixtures) {
  CredentialStore store =
      CredentialStore::fromCsvFile(options.credentials(), AttributeCatalog::standard());
  if (withFixtures) {
    CredentialStore fixtures = CredentialStore::fromCsvFile(
        options.experimentProviders(), AttributeCatalog::standard());
    store.merge(fixtures);
  }
  return store;
}

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  for (char c : text) {
    if (c == ',') {
      items.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) items.push_back(item);
  return items;
}

void printProfile(const Profile& profile) {
  for (const auto& category : profile.categories) {
    std::cout << "  " << category.name << "\n";
    for (const auto& subset : category.subsets) {
      std::cout << "    " << subset.name << "\n";
      for (const auto& item : subset.items) {
        std::cout << "      " << item.attribute << " = " << item.value << "\n";
      }
    }
  }
}

int runCategorize(const GlobalOptions& options, const std::string& consumerId,
                  const std::string& requestList, const std::string& context) {
  Ontology ontology = Ontology::fromJsonFile(options.ontology());
  std::vector<Account> accounts = loadAccounts(options.accounts());

  bool found = false;
  for (const auto& account : accounts) {
    if (!consumerId.empty() && account.consumerId != consumerId) continue;
    found = true;
    Profile profile = categorize(ontology, account.fields);
    std::cout << "consumer: " << account.consumerId << "\n";
    printProfile(profile);
    std::cout << "  subset counts:";
    for (const auto& category : profile.categories) {
      std::cout << " " << category.name << "=" << category.subsets.size();
    }
    std::cout << "\n";
    if (!profile.rejectedFields.empty()) {
      std::cout << "  rejected fields:";
      for (const auto& name : profile.rejectedFields) std::cout << " " << name;
      std::cout << "\n";
    }
    if (requestList.empty()) continue;

    RequestMatch match = matchRequest(ontology, profile, splitList(requestList));
    std::cout << "  request coverage:";
    for (std::size_t i = 0; i < profile.categories.size(); ++i) {
      std::cout << " " << profile.categories[i].name << "=" << match.alpha[i];
    }
    std::cout << "\n";
    if (!match.rejectedFields.empty()) {
      std::cout << "  rejected request fields:";
      for (const auto& name : match.rejectedFields) std::cout << " " << name;
      std::cout << "\n";
    }
    if (context.empty()) continue;

    auto weightsIt = account.riskWeights.find(context);
    if (weightsIt == account.riskWeights.end()) {
      std::cout << "  no weights stored for context " << context << "\n";
      continue;
    }
    std::vector<int> counts = profile.subsetCounts();
    std::vector<double> weights;
    for (const auto& category : profile.categories) {
      weights.push_back(weightsIt->second.at(category.name));
    }
    RiskBreakdown breakdown = quantifyRisk(counts, match.alpha, weights);
    std::cout << "  risk per category:";
    for (std::size_t i = 0; i < profile.categories.size(); ++i) {
      std::cout << " " << profile.categories[i].name << "="
                << formatDouble(breakdown.perCategory[i]);
    }
    std::cout << "\n  total risk: " << formatDouble(breakdown.total) << "\n";
  }
  if (!found) {
    std::cerr << "dmarket: no such consumer: " << consumerId << "\n";
    return 1;
  }
  return 0;
}

int runRate(const GlobalOptions& options, const std::string& provider,
            bool withFixtures) {
  CredentialStore store = loadCredentials(options, withFixtures);
  PcrReport report = buildReport(store, provider);
  std::cout << report.render();
  return 0;
}

int runPayoff(const GlobalOptions& options, double psi, double initial,
              double drift, double volatility, double time, int samples) {
  PremiumModel model{initial, drift, volatility};
  double premium = expectedPremium(model, time);
  std::cout << "expected premium: " << formatDouble(premium) << "\n";
  std::cout << "expected payoff: " << formatDouble(expectedPayoff(psi, premium))
            << "\n";
  if (samples > 0) {
    Rng rng(options.seed);
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = 0.0;
    for (int i = 0; i < samples; ++i) {
      double value = samplePremium(model, time, rng);
      sum += value;
      min = std::min(min, value);
      max = std::max(max, value);
    }
    double mean = sum / samples;
    std::cout << "sampled premium mean (" << samples
              << " paths): " << formatDouble(mean) << "\n";
    std::cout << "sampled premium range: [" << formatDouble(min) << ", "
              << formatDouble(max) << "]\n";
    std::cout << "sampled payoff mean: " << formatDouble(psi * mean) << "\n";
  }
  return 0;
}

void printPipelineResult(const PipelineResult& run) {
  std::cout << "task ledger:\n";
  for (const auto& record : run.ledger) {
    std::cout << "  " << record.stage << ": " << record.result << "\n";
  }
  std::cout << "provider rating: " << formatDouble(run.report.rating.stars)
            << " stars (" << toString(run.report.rating.label) << ")\n";
  const SessionResult& session = run.session;
  if (session.outcome == SessionOutcome::Agreement) {
    std::cout << "agreement: price " << formatDouble(session.agreedPrice)
              << " for " << session.agreedCount << " records in "
              << session.rounds << " rounds\n";
  } else {
    std::cout << "no agreement after " << session.rounds << " rounds\n";
  }
  if (run.settlement) {
    std::cout << "settlement: community value "
              << formatDouble(run.settlement->communityValue) << ", surplus "
              << formatDouble(run.settlement->surplus) << " over "
              << run.settlement->rows.size() << " members\n";
  }
  std::cout << "consumer benefit: " << formatDouble(run.consumerBenefit)
            << "\nprovider benefit: " << formatDouble(run.providerBenefit) << "\n";
}

int runNegotiate(const GlobalOptions& options, SessionConfig session,
                 int syntheticSize, double mean, double stddev,
                 const std::string& requestList, bool withFixtures) {
  Ontology ontology = Ontology::fromJsonFile(options.ontology());
  std::vector<Account> accounts = loadAccounts(options.accounts());
  CredentialStore store = loadCredentials(options, withFixtures);

  session.provider.id = session.providerId;
  session.seed = options.seed;
  if (syntheticSize > 0) {
    session.synthetic = PopulationSpec{syntheticSize, mean, stddev};
  } else {
    session.requestFields = splitList(requestList);
  }

  Marketplace market(std::move(ontology), std::move(store), std::move(accounts));
  PipelineResult run = market.runSession(session);
  printPipelineResult(run);

  if (!options.outDir.empty()) {
    std::filesystem::create_directories(options.outDir);
    std::ofstream log(options.outDir + "/message_log.jsonl", std::ios::binary);
    market.log().writeJsonl(log);
    std::cout << "wrote " << options.outDir << "/message_log.jsonl\n";
  }
  return 0;
}

int runExperimentCmd(const GlobalOptions& options, int id) {
  ExperimentConfig config;
  if (!options.configPath.empty()) {
    config = ExperimentConfig::fromJsonFile(options.configPath);
  } else {
    config = ExperimentConfig::defaults(id);
  }
  // Experiments carry their own default seeds; an explicit --seed wins.
  if (options.seedGiven) config.seed = options.seed;
  if (id != 0 && !options.configPath.empty() && config.id != id) {
    std::cerr << "dmarket: --id " << id << " conflicts with config experiment "
              << config.id << "\n";
    return 1;
  }

  Ontology ontology = Ontology::fromJsonFile(options.ontology());
  std::vector<Account> accounts = loadAccounts(options.accounts());
  CredentialStore store = loadCredentials(options, true);

  std::string outDir = options.outDir.empty()
                           ? "out/exp" + std::to_string(config.id)
                           : options.outDir;
  ExperimentResult result = runExperiment(config, ontology, store, accounts, outDir);

  if (!result.providerSummary.empty()) {
    std::cout << "provider outcomes:\n";
    for (const auto& row : result.providerSummary) {
      std::cout << "  " << row.provider << " (" << formatDouble(row.stars)
                << " stars): "
                << (row.outcome == SessionOutcome::Agreement ? "agreement"
                                                             : "failure")
                << " price " << formatDouble(row.agreedPrice) << ", "
                << row.transactions << " records, provider benefit "
                << formatDouble(row.providerBenefit) << "\n";
    }
  }
  if (!result.sweepPoints.empty()) {
    std::cout << "drift sweep points: " << result.sweepPoints.size() << "\n";
  }
  std::cout << "artifacts:\n";
  for (const auto& file : result.writtenFiles) {
    std::cout << "  " << file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic personal data market engine"};
  app.require_subcommand(1);

  GlobalOptions options;
  auto* seedOpt = app.add_option("--seed", options.seed, "random seed");
  app.add_option("--config", options.configPath, "experiment config JSON");
  app.add_option("--out", options.outDir, "output directory");
  app.add_option("--data-dir", options.dataDir, "data directory");
  app.add_option("--accounts", options.accountsPath, "account store (JSON lines)");
  app.add_option("--credentials", options.credentialsPath, "credential CSV");
  app.add_option("--ontology", options.ontologyPath, "ontology JSON");

  auto* categorizeCmd =
      app.add_subcommand("categorize", "categorize stored accounts");
  categorizeCmd->fallthrough();
  std::string consumerId;
  std::string requestList;
  std::string context;
  categorizeCmd->add_option("--consumer", consumerId, "restrict to one consumer");
  categorizeCmd->add_option("--request", requestList,
                            "comma separated requested fields");
  categorizeCmd->add_option("--context", context, "weight context for risk");

  auto* rateCmd = app.add_subcommand("rate", "rate a provider's privacy practices");
  rateCmd->fallthrough();
  std::string provider;
  bool withFixtures = false;
  rateCmd->add_option("--provider", provider, "provider name")->required();
  rateCmd->add_flag("--with-fixtures", withFixtures,
                    "include the experiment provider fixtures");

  auto* payoffCmd = app.add_subcommand("payoff", "premium and payoff valuation");
  payoffCmd->fallthrough();
  double psi = 0.0;
  double initial = 50.0;
  double drift = 0.0;
  double volatility = 0.0;
  double time = 1.0;
  int samples = 0;
  payoffCmd->add_option("--psi", psi, "revelation risk in [0, 1]")->required();
  payoffCmd->add_option("--premium-initial", initial, "premium at time zero");
  payoffCmd->add_option("--drift", drift, "premium drift");
  payoffCmd->add_option("--volatility", volatility, "premium volatility");
  payoffCmd->add_option("--time", time, "valuation horizon");
  payoffCmd->add_option("--samples", samples, "also simulate this many paths");

  auto* negotiateCmd =
      app.add_subcommand("negotiate", "run one full market session");
  negotiateCmd->fallthrough();
  SessionConfig session;
  session.providerId = "Circuitcity.com";
  session.provider = ProviderParams{"", 70.0, 50.0, 25, 5.0, 0.1};
  session.consumer = ConsumerParams{45.0, 45.0, 50,
                                    std::numeric_limits<double>::infinity()};
  session.premium = PremiumModel{50.0, 0.0, 0.3};
  session.contextId = "Circuitcity.com";
  std::string negotiateRequest =
      "Home Phone,Personal Email,Soccer,Salary";
  int syntheticSize = 0;
  double mean = 0.6;
  double stddev = 0.25;
  bool negotiateFixtures = false;
  std::string paymentMode = "uniform";
  negotiateCmd->add_option("--provider", session.providerId, "provider name");
  negotiateCmd->add_option("--context", session.contextId, "weight context");
  negotiateCmd->add_option("--request", negotiateRequest, "requested fields");
  negotiateCmd->add_option("--utility", session.provider.utility,
                           "provider value per record");
  negotiateCmd->add_option("--provider-reserve", session.provider.reservationPrice,
                           "provider reservation price");
  negotiateCmd->add_option("--provider-deadline", session.provider.deadline,
                           "provider deadline (rounds)");
  negotiateCmd->add_option("--increment", session.provider.bidIncrement,
                           "provider bid increment");
  negotiateCmd->add_option("--consumer-reserve", session.consumer.reservationPrice,
                           "consumer reservation price");
  negotiateCmd->add_option("--consumer-initial", session.consumer.initialPrice,
                           "consumer initial price");
  negotiateCmd->add_option("--consumer-deadline", session.consumer.deadline,
                           "consumer deadline (rounds)");
  negotiateCmd->add_option("--eta", session.consumer.eta,
                           "consumer concession exponent");
  negotiateCmd->add_option("--synthetic", syntheticSize,
                           "use a synthetic population of this size");
  negotiateCmd->add_option("--mean", mean, "synthetic risk mean");
  negotiateCmd->add_option("--stddev", stddev, "synthetic risk stddev");
  negotiateCmd->add_option("--payment", paymentMode, "uniform or individual");
  negotiateCmd->add_flag("--with-fixtures", negotiateFixtures,
                         "include the experiment provider fixtures");

  auto* experimentCmd = app.add_subcommand("experiment", "run a full experiment");
  experimentCmd->fallthrough();
  int experimentId = 0;
  experimentCmd->add_option("--id", experimentId, "experiment number 1..4");

  CLI11_PARSE(app, argc, argv);
  options.seedGiven = seedOpt->count() > 0;

  try {
    if (categorizeCmd->parsed()) {
      return runCategorize(options, consumerId, requestList, context);
    }
    if (rateCmd->parsed()) {
      return runRate(options, provider, withFixtures);
    }
    if (payoffCmd->parsed()) {
      return runPayoff(options, psi, initial, drift, volatility, time, samples);
    }
    if (negotiateCmd->parsed()) {
      if (paymentMode == "individual") {
        session.payment = PaymentMode::Individual;
      } else if (paymentMode != "uniform") {
        std::cerr << "dmarket: --payment must be uniform or individual\n";
        return 1;
      }
      session.conversationId = "cli-session";
      return runNegotiate(options, session, syntheticSize, mean, stddev,
                          negotiateRequest, negotiateFixtures);
    }
    if (experimentCmd->parsed()) {
      if (experimentId == 0 && options.configPath.empty()) {
        std::cerr << "dmarket: experiment needs --id or --config\n";
        return 1;
      }
      return runExperimentCmd(options, experimentId);
    }
  } catch (const std::exception& e) {
    std::cerr << "dmarket: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
