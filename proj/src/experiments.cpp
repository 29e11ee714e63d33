#include "dmarket/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "dmarket/numeric.hpp"
#include "text_io.hpp"

namespace dmarket {

namespace {

using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error("experiment: " + message);
}

double snapGrid(double value) {
  return std::nearbyint(value * 1e9) / 1e9;
}

double etaFromJson(const OrderedJson& value) {
  if (value.is_string()) {
    std::string text = value.get<std::string>();
    if (text == "inf" || text == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    fail("eta must be a number or \"inf\"");
  }
  return value.get<double>();
}

OrderedJson etaToJson(double eta) {
  if (std::isinf(eta)) return "inf";
  return eta;
}

OrderedJson configToJson(const ExperimentConfig& config) {
  OrderedJson doc;
  doc["experiment"] = config.id;
  doc["seed"] = config.seed;
  doc["consumer"] = {
      {"initial_price", config.consumer.initialPrice},
      {"reservation_price", config.consumer.reservationPrice},
      {"deadline", config.consumer.deadline},
      {"eta", etaToJson(config.consumer.eta)},
  };
  doc["provider"] = {
      {"id", config.provider.id},
      {"utility", config.provider.utility},
      {"reservation_price", config.provider.reservationPrice},
      {"deadline", config.provider.deadline},
      {"bid_increment", config.provider.bidIncrement},
      {"initial_fraction", config.provider.initialFraction},
  };
  doc["providers"] = config.providers;
  doc["population"] = {
      {"size", config.population.size},
      {"mean", config.population.mean},
      {"stddev", config.population.stddev},
  };
  doc["couple_population_to_stars"] = config.couplePopulationToStars;
  doc["pcr_coupling"] = {
      {"mean_base", config.coupling.meanBase},
      {"mean_slope", config.coupling.meanSlope},
      {"stddev", config.coupling.stddev},
  };
  doc["premium"] = {
      {"initial", config.premium.initial},
      {"drift", config.premium.drift},
      {"volatility", config.premium.volatility},
  };
  doc["premium_time"] = config.premiumTime;
  doc["payment_mode"] = toString(config.payment);
  doc["drift_sweep"] = {
      {"from", config.sweep.from},
      {"to", config.sweep.to},
      {"step", config.sweep.step},
  };
  return doc;
}

std::string csvEscape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::vector<double> DriftSweep::points() const {
  if (!(step > 0.0)) fail("sweep step must be positive");
  if (to < from) fail("sweep range is empty");
  int count = static_cast<int>(std::floor((to - from) / step + 0.5));
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count) + 1);
  for (int i = 0; i <= count; ++i) {
    values.push_back(snapGrid(from + i * step));
  }
  return values;
}

ExperimentConfig ExperimentConfig::defaults(int id) {
  ExperimentConfig config;
  config.id = id;
  config.seed = 42;
  config.premium = PremiumModel{50.0, 0.0, 0.3};
  config.premiumTime = 1.0;
  config.population = PopulationSpec{2000, 0.6, 0.25};

  const std::vector<std::string> travelProviders = {
      "Escapes.com", "Expedia.com", "Travelocity.com", "Canadatransel.ca",
      "Itravel2000.com"};

  switch (id) {
    case 1:
      config.consumer = ConsumerParams{45.0, 45.0, 10,
                                       std::numeric_limits<double>::infinity()};
      config.provider = ProviderParams{"Circuitcity.com", 70.0, 35.0, 6, 3.0, 0.1};
      config.payment = PaymentMode::Uniform;
      break;
    case 2:
      config.consumer = ConsumerParams{45.0, 45.0, 50,
                                       std::numeric_limits<double>::infinity()};
      config.provider = ProviderParams{"Circuitcity.com", 70.0, 50.0, 25, 5.0, 0.1};
      config.payment = PaymentMode::Uniform;
      break;
    case 3:
      config.consumer = ConsumerParams{45.0, 45.0, 100,
                                       std::numeric_limits<double>::infinity()};
      config.provider = ProviderParams{"", 70.0, 35.0, 100, 3.0, 0.1};
      config.providers = travelProviders;
      config.payment = PaymentMode::Individual;
      config.couplePopulationToStars = true;
      break;
    case 4:
      config.consumer = ConsumerParams{45.0, 45.0, 15,
                                       std::numeric_limits<double>::infinity()};
      config.provider = ProviderParams{"", 70.0, 35.0, 10, 3.0, 0.1};
      config.providers = travelProviders;
      config.payment = PaymentMode::Individual;
      config.couplePopulationToStars = true;
      config.seed = 7;
      break;
    default:
      fail("unknown experiment id: " + std::to_string(id));
  }
  return config;
}

ExperimentConfig ExperimentConfig::fromJsonFile(const std::string& path) {
  return fromJsonText(detail::readTextFile(path));
}

ExperimentConfig ExperimentConfig::fromJsonText(const std::string& text) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("bad config JSON: ") + e.what());
  }
  int id = doc.at("experiment").get<int>();
  ExperimentConfig config = defaults(id);

  if (doc.contains("seed")) config.seed = doc.at("seed").get<std::uint64_t>();
  if (doc.contains("consumer")) {
    const auto& c = doc.at("consumer");
    if (c.contains("initial_price")) {
      config.consumer.initialPrice = c.at("initial_price").get<double>();
    }
    if (c.contains("reservation_price")) {
      config.consumer.reservationPrice = c.at("reservation_price").get<double>();
    }
    if (c.contains("deadline")) config.consumer.deadline = c.at("deadline").get<int>();
    if (c.contains("eta")) config.consumer.eta = etaFromJson(c.at("eta"));
  }
  if (doc.contains("provider")) {
    const auto& p = doc.at("provider");
    if (p.contains("id")) config.provider.id = p.at("id").get<std::string>();
    if (p.contains("utility")) config.provider.utility = p.at("utility").get<double>();
    if (p.contains("reservation_price")) {
      config.provider.reservationPrice = p.at("reservation_price").get<double>();
    }
    if (p.contains("deadline")) config.provider.deadline = p.at("deadline").get<int>();
    if (p.contains("bid_increment")) {
      config.provider.bidIncrement = p.at("bid_increment").get<double>();
    }
    if (p.contains("initial_fraction")) {
      config.provider.initialFraction = p.at("initial_fraction").get<double>();
    }
  }
  if (doc.contains("providers")) {
    config.providers = doc.at("providers").get<std::vector<std::string>>();
  }
  if (doc.contains("population")) {
    const auto& p = doc.at("population");
    if (p.contains("size")) config.population.size = p.at("size").get<int>();
    if (p.contains("mean")) config.population.mean = p.at("mean").get<double>();
    if (p.contains("stddev")) config.population.stddev = p.at("stddev").get<double>();
  }
  if (doc.contains("couple_population_to_stars")) {
    config.couplePopulationToStars = doc.at("couple_population_to_stars").get<bool>();
  }
  if (doc.contains("pcr_coupling")) {
    const auto& p = doc.at("pcr_coupling");
    if (p.contains("mean_base")) config.coupling.meanBase = p.at("mean_base").get<double>();
    if (p.contains("mean_slope")) {
      config.coupling.meanSlope = p.at("mean_slope").get<double>();
    }
    if (p.contains("stddev")) config.coupling.stddev = p.at("stddev").get<double>();
  }
  if (doc.contains("premium")) {
    const auto& p = doc.at("premium");
    if (p.contains("initial")) config.premium.initial = p.at("initial").get<double>();
    if (p.contains("drift")) config.premium.drift = p.at("drift").get<double>();
    if (p.contains("volatility")) {
      config.premium.volatility = p.at("volatility").get<double>();
    }
  }
  if (doc.contains("premium_time")) {
    config.premiumTime = doc.at("premium_time").get<double>();
  }
  if (doc.contains("payment_mode")) {
    std::string mode = doc.at("payment_mode").get<std::string>();
    if (mode == "uniform") {
      config.payment = PaymentMode::Uniform;
    } else if (mode == "individual") {
      config.payment = PaymentMode::Individual;
    } else {
      fail("payment_mode must be uniform or individual");
    }
  }
  if (doc.contains("drift_sweep")) {
    const auto& s = doc.at("drift_sweep");
    if (s.contains("from")) config.sweep.from = s.at("from").get<double>();
    if (s.contains("to")) config.sweep.to = s.at("to").get<double>();
    if (s.contains("step")) config.sweep.step = s.at("step").get<double>();
  }
  return config;
}

namespace {

ProviderOutcome summarize(const std::string& provider, double stars,
                          double populationMean, const PipelineResult& run) {
  ProviderOutcome outcome;
  outcome.provider = provider;
  outcome.stars = stars;
  outcome.populationMean = populationMean;
  outcome.outcome = run.session.outcome;
  outcome.agreedPrice = run.session.agreedPrice;
  outcome.transactions =
      run.session.outcome == SessionOutcome::Agreement ? run.session.agreedCount : 0;
  outcome.consumerBenefit = run.consumerBenefit;
  outcome.providerBenefit = run.providerBenefit;
  return outcome;
}

std::string offerCurveCsv(const SessionResult& session) {
  std::ostringstream out;
  out << "round,provider_offer,consumer_count\n";
  for (const auto& point : session.offerCurve) {
    out << point.round << "," << formatDouble(point.providerOffer) << ","
        << point.consumerCount << "\n";
  }
  return out.str();
}

std::string settlementCsv(const Settlement& settlement) {
  std::ostringstream out;
  out << "consumer_id,valuation,share,payout\n";
  for (const auto& row : settlement.rows) {
    out << csvEscape(row.consumerId) << "," << formatDouble(row.valuation) << ","
        << formatDouble(row.share) << "," << formatDouble(row.payout) << "\n";
  }
  return out.str();
}

std::string providerSummaryCsv(const std::vector<ProviderOutcome>& rows) {
  std::ostringstream out;
  out << "provider,stars,population_mean,outcome,agreed_price,"
         "completed_transactions,consumer_benefit,provider_benefit\n";
  for (const auto& row : rows) {
    out << csvEscape(row.provider) << "," << formatDouble(row.stars) << ","
        << formatDouble(row.populationMean) << ","
        << (row.outcome == SessionOutcome::Agreement ? "agreement" : "failure")
        << "," << formatDouble(row.agreedPrice) << "," << row.transactions << ","
        << formatDouble(row.consumerBenefit) << ","
        << formatDouble(row.providerBenefit) << "\n";
  }
  return out.str();
}

std::string driftSweepCsv(const std::vector<DriftPoint>& rows) {
  std::ostringstream out;
  out << "provider,stars,drift,premium,completed_transactions,"
         "consumer_benefit,provider_benefit\n";
  for (const auto& row : rows) {
    out << csvEscape(row.provider) << "," << formatDouble(row.stars) << ","
        << formatDouble(row.drift) << "," << formatDouble(row.premium) << ","
        << row.transactions << "," << formatDouble(row.consumerBenefit) << ","
        << formatDouble(row.providerBenefit) << "\n";
  }
  return out.str();
}

}  // namespace

ExperimentResult runExperiment(const ExperimentConfig& config,
                               const Ontology& ontology,
                               const CredentialStore& credentials,
                               const std::vector<Account>& accounts,
                               const std::string& outDir) {
  if (config.id < 1 || config.id > 4) {
    fail("unknown experiment id: " + std::to_string(config.id));
  }
  const bool multiProvider = config.id >= 3;

  // Fail before any simulation work if a provider fixture is missing.
  std::vector<std::string> providerNames;
  if (multiProvider) {
    if (config.providers.empty()) fail("experiment needs a provider list");
    providerNames = config.providers;
  } else {
    if (config.provider.id.empty()) fail("experiment needs a provider id");
    providerNames = {config.provider.id};
  }
  for (const auto& name : providerNames) {
    if (credentials.find(name) == nullptr) {
      fail("unknown provider: " + name);
    }
  }

  std::filesystem::create_directories(outDir);
  Marketplace market(ontology, credentials, accounts);

  ExperimentResult result;
  result.id = config.id;

  auto sessionConfigFor = [&](const std::string& providerName,
                              std::size_t providerIndex, double stars,
                              const PremiumModel& premium,
                              const std::string& conversationId) {
    SessionConfig session;
    session.providerId = providerName;
    session.provider = config.provider;
    session.provider.id = providerName;
    session.consumer = config.consumer;
    session.premium = premium;
    session.premiumTime = config.premiumTime;
    session.payment = config.payment;
    session.seed = deriveSeed(config.seed, providerIndex);
    session.conversationId = conversationId;
    PopulationSpec population = config.population;
    if (config.couplePopulationToStars) {
      population.mean = config.coupling.meanFor(stars);
      population.stddev = config.coupling.stddev;
    }
    session.synthetic = population;
    return session;
  };

  auto starsFor = [&](const std::string& providerName) {
    return buildReport(credentials, providerName).rating.stars;
  };

  if (config.id == 1 || config.id == 2) {
    const std::string& providerName = providerNames.front();
    double stars = starsFor(providerName);
    SessionConfig session = sessionConfigFor(
        providerName, 0, stars, config.premium,
        "exp" + std::to_string(config.id) + ":" + providerName);
    PipelineResult run = market.runSession(session);
    result.providerSummary.push_back(
        summarize(providerName, stars, session.synthetic->mean, run));
    result.sessions.push_back(run.session);
    if (run.settlement) result.settlements.push_back(*run.settlement);

    detail::writeTextFile(outDir + "/offer_curve.csv", offerCurveCsv(run.session));
    result.writtenFiles.push_back(outDir + "/offer_curve.csv");
    if (run.settlement) {
      detail::writeTextFile(outDir + "/settlement.csv", settlementCsv(*run.settlement));
      result.writtenFiles.push_back(outDir + "/settlement.csv");
    }
    detail::writeTextFile(outDir + "/provider_summary.csv",
                          providerSummaryCsv(result.providerSummary));
    result.writtenFiles.push_back(outDir + "/provider_summary.csv");
  } else if (config.id == 3) {
    for (std::size_t k = 0; k < providerNames.size(); ++k) {
      const std::string& providerName = providerNames[k];
      double stars = starsFor(providerName);
      SessionConfig session = sessionConfigFor(providerName, k, stars,
                                               config.premium,
                                               "exp3:" + providerName);
      PipelineResult run = market.runSession(session);
      result.providerSummary.push_back(
          summarize(providerName, stars, session.synthetic->mean, run));
      result.sessions.push_back(run.session);
      if (run.settlement) result.settlements.push_back(*run.settlement);
    }
    detail::writeTextFile(outDir + "/provider_summary.csv",
                          providerSummaryCsv(result.providerSummary));
    result.writtenFiles.push_back(outDir + "/provider_summary.csv");
  } else {
    std::vector<double> drifts = config.sweep.points();
    for (std::size_t k = 0; k < providerNames.size(); ++k) {
      const std::string& providerName = providerNames[k];
      double stars = starsFor(providerName);
      for (double drift : drifts) {
        PremiumModel premium = config.premium;
        premium.drift = drift - 1.0;
        SessionConfig session = sessionConfigFor(
            providerName, k, stars, premium,
            "exp4:" + providerName + ":drift=" + formatDouble(drift));
        session.premiumTime = 1.0;  // premium = initial * e^(drift - 1)
        PipelineResult run = market.runSession(session);
        DriftPoint point;
        point.provider = providerName;
        point.stars = stars;
        point.drift = drift;
        point.premium = expectedPremium(premium, 1.0);
        point.transactions = run.session.outcome == SessionOutcome::Agreement
                                 ? run.session.agreedCount
                                 : 0;
        point.consumerBenefit = run.consumerBenefit;
        point.providerBenefit = run.providerBenefit;
        result.sweepPoints.push_back(point);
        result.sessions.push_back(run.session);
      }
    }
    detail::writeTextFile(outDir + "/drift_sweep.csv",
                          driftSweepCsv(result.sweepPoints));
    result.writtenFiles.push_back(outDir + "/drift_sweep.csv");
  }

  detail::writeTextFile(outDir + "/message_log.jsonl", market.log().toJsonl());
  result.writtenFiles.push_back(outDir + "/message_log.jsonl");

  OrderedJson manifest;
  manifest["experiment"] = config.id;
  manifest["seed"] = config.seed;
  manifest["engine_version"] = "1.0.0";
  manifest["config"] = configToJson(config);
  OrderedJson outputs = OrderedJson::array();
  for (const auto& path : result.writtenFiles) {
    outputs.push_back(std::filesystem::path(path).filename().string());
  }
  manifest["outputs"] = outputs;
  detail::writeTextFile(outDir + "/manifest.json", manifest.dump(2) + "\n");
  result.writtenFiles.push_back(outDir + "/manifest.json");

  return result;
}

}  // namespace dmarket
