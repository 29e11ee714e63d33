#include "dmarket/rating.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dmarket/numeric.hpp"
#include "text_io.hpp"

namespace dmarket {

namespace {

constexpr double kLabelCenters[5] = {0.0, 0.25, 0.5, 0.75, 1.0};

struct TwoLevel {
  double ge = 0.0;  // confidently at or above half
  double lt = 0.0;  // confidently below half
};

struct ThreeLevel {
  double ge = 0.0;  // at or above half
  double le = 0.0;  // right at the half boundary
  double lt = 0.0;  // below half
};

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Memberships are piecewise linear in the credit ratio r = k / n with a
// transition band of width min(2/n, 1) centered on one half, so integer
// counts two or more steps away from the boundary grade crisply.
TwoLevel twoLevel(int k, int n) {
  double r = static_cast<double>(k) / n;
  double w = std::min(2.0 / n, 1.0);
  TwoLevel out;
  out.ge = clamp01(0.5 + (r - 0.5) / w);
  out.lt = 1.0 - out.ge;
  return out;
}

ThreeLevel threeLevel(int k, int n) {
  double r = static_cast<double>(k) / n;
  double w = std::min(2.0 / n, 1.0);
  ThreeLevel out;
  out.ge = clamp01(0.5 + (r - 0.5) / w);
  out.lt = clamp01(0.5 + (0.5 - 2.0 * r) / w);
  out.le = std::max(0.0, 1.0 - out.ge - out.lt);
  return out;
}

}  // namespace

AttributeCatalog::AttributeCatalog(std::vector<CatalogAttribute> attributes)
    : attributes_(std::move(attributes)) {
  if (attributes_.empty()) {
    throw std::invalid_argument("catalog: no attributes");
  }
  std::set<std::string> names;
  for (const auto& attribute : attributes_) {
    if (attribute.name.empty()) throw std::invalid_argument("catalog: unnamed attribute");
    if (!names.insert(attribute.name).second) {
      throw std::invalid_argument("catalog: duplicate attribute: " + attribute.name);
    }
  }
}

AttributeCatalog AttributeCatalog::standard() {
  using L = PrivacyLevel;
  return AttributeCatalog({
      {"shares_with_unknown_policy",
       "Shares consumers' personal information with companies whose privacy "
       "policies are unknown",
       L::High, true},
      {"collects_unknown_purpose",
       "Collects personal information for unknown purposes", L::High, true},
      {"shares_identifying",
       "Shares consumers' data that identifies them with marketing companies",
       L::High, true},
      {"uses_for_ads",
       "Uses consumers' data that identifies them for advertisement", L::High,
       true},
      {"privacy_seal", "Has valid privacy seal certificate (BBB, TRUSTe, ...)",
       L::High, false},
      {"issues_reports", "Reports to consumer of any impact on their private data",
       L::Low, false},
      {"audit_membership", "Member of privacy compliance auditing service",
       L::High, false},
      {"secure_infrastructure",
       "Implements secure infrastructure to protect consumer data", L::Low,
       false},
      {"opt_out", "Allows consumers to opt out from mailing lists", L::High,
       false},
      {"personnel_trained",
       "Employed personnel are trained to respect consumers' privacy",
       L::Medium, false},
  });
}

int AttributeCatalog::levelSize(PrivacyLevel level) const {
  int count = 0;
  for (const auto& attribute : attributes_) {
    if (attribute.level == level) ++count;
  }
  return count;
}

CreditCounts countCredits(const AttributeCatalog& catalog,
                          const CredentialRecord& record) {
  const auto& attributes = catalog.attributes();
  if (record.values.size() != attributes.size()) {
    throw std::invalid_argument("credential record does not match catalog width");
  }
  CreditCounts counts;
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    bool credit = attributes[i].negativePolarity ? !record.values[i] : record.values[i];
    if (!credit) continue;
    switch (attributes[i].level) {
      case PrivacyLevel::High: ++counts.high; break;
      case PrivacyLevel::Medium: ++counts.medium; break;
      case PrivacyLevel::Low: ++counts.low; break;
    }
  }
  return counts;
}

std::string toString(RatingLabel label) {
  switch (label) {
    case RatingLabel::VeryLow: return "very-low";
    case RatingLabel::Low: return "low";
    case RatingLabel::Medium: return "medium";
    case RatingLabel::High: return "high";
    case RatingLabel::VeryHigh: return "very-high";
  }
  return "?";
}

RatingResult ratePrivacy(const CreditCounts& credits,
                         const AttributeCatalog& catalog) {
  const int nHigh = catalog.levelSize(PrivacyLevel::High);
  const int nMedium = catalog.levelSize(PrivacyLevel::Medium);
  const int nLow = catalog.levelSize(PrivacyLevel::Low);
  if (credits.high < 0 || credits.high > nHigh || credits.medium < 0 ||
      credits.medium > nMedium || credits.low < 0 || credits.low > nLow) {
    throw std::invalid_argument("credit counts outside catalog level sizes");
  }

  // A level with no attributes cannot discriminate; grade it as crisply
  // met so it drops out of the inference.
  TwoLevel x = nHigh > 0 ? twoLevel(credits.high, nHigh) : TwoLevel{1.0, 0.0};
  ThreeLevel y = nMedium > 0 ? threeLevel(credits.medium, nMedium)
                             : ThreeLevel{1.0, 0.0, 0.0};
  TwoLevel zz = nLow > 0 ? twoLevel(credits.low, nLow) : TwoLevel{1.0, 0.0};
  double zGe = zz.ge;
  double zLe = zz.lt;  // at or below half

  RatingResult out;
  auto& mass = out.mass;
  // Rule grid: high-set standing splits the top, the medium boundary
  // hedges the middle, the low set breaks the remaining ties.
  mass[4] += x.ge * y.ge;                 // strong on high and medium
  mass[3] += x.ge * y.le + x.ge * y.lt;   // strong on high only
  mass[2] += x.lt * y.ge;                 // carried by the medium set
  mass[2] += x.lt * y.le * zGe;
  mass[1] += x.lt * y.le * zLe;
  mass[1] += x.lt * y.lt * zGe;
  mass[0] += x.lt * y.lt * zLe;

  double phi = 0.0;
  for (int i = 0; i < 5; ++i) phi += mass[i] * kLabelCenters[i];
  out.phi = phi;

  int best = 0;
  for (int i = 1; i < 5; ++i) {
    if (mass[i] >= mass[best]) best = i;  // ties resolve upward
  }
  out.label = static_cast<RatingLabel>(best);
  out.stars = starsFromPhi(phi);
  return out;
}

double starsFromPhi(double phi) {
  return std::floor(phi * 10.0 + 0.5) / 2.0;
}

CredentialStore CredentialStore::fromCsvFile(const std::string& path,
                                             AttributeCatalog catalog) {
  return fromCsvText(detail::readTextFile(path), std::move(catalog));
}

CredentialStore CredentialStore::fromCsvText(const std::string& text,
                                             AttributeCatalog catalog) {
  auto rows = detail::parseCsv(text);
  if (rows.empty()) throw std::runtime_error("credentials: empty CSV");

  const auto& attributes = catalog.attributes();
  const auto& header = rows.front();
  const std::size_t expectedColumns = 2 + attributes.size();
  if (header.size() != expectedColumns || header[0] != "provider" ||
      header[1] != "reputation") {
    throw std::runtime_error("credentials: header must be provider,reputation,"
                             "then one column per catalog attribute");
  }
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (header[2 + i] != attributes[i].name) {
      throw std::runtime_error("credentials: column " + std::to_string(2 + i) +
                               " should be " + attributes[i].name + ", got " +
                               header[2 + i]);
    }
  }

  CredentialStore store;
  store.catalog_ = std::move(catalog);
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != expectedColumns) {
      throw std::runtime_error("credentials: row " + std::to_string(r + 1) +
                               " has " + std::to_string(row.size()) + " fields");
    }
    CredentialRecord record;
    record.provider = row[0];
    if (record.provider.empty()) {
      throw std::runtime_error("credentials: row " + std::to_string(r + 1) +
                               " has an empty provider name");
    }
    if (!seen.insert(record.provider).second) {
      throw std::runtime_error("credentials: duplicate provider: " + record.provider);
    }
    if (!row[1].empty()) record.reputation = parseDouble(row[1]);
    for (std::size_t i = 2; i < row.size(); ++i) {
      if (row[i] == "0") {
        record.values.push_back(false);
      } else if (row[i] == "1") {
        record.values.push_back(true);
      } else {
        throw std::runtime_error("credentials: row " + std::to_string(r + 1) +
                                 " column " + std::to_string(i + 1) +
                                 " must be 0 or 1, got " + row[i]);
      }
    }
    store.records_.push_back(std::move(record));
  }
  return store;
}

void CredentialStore::merge(const CredentialStore& other) {
  const auto& mine = catalog_.attributes();
  const auto& theirs = other.catalog_.attributes();
  if (mine.size() != theirs.size()) {
    throw std::runtime_error("credentials: cannot merge stores with different catalogs");
  }
  for (std::size_t i = 0; i < mine.size(); ++i) {
    if (mine[i].name != theirs[i].name) {
      throw std::runtime_error("credentials: cannot merge stores with different catalogs");
    }
  }
  for (const auto& record : other.records_) {
    bool replaced = false;
    for (auto& existing : records_) {
      if (existing.provider == record.provider) {
        existing = record;
        replaced = true;
        break;
      }
    }
    if (!replaced) {
      records_.push_back(record);
    }
  }
}

const CredentialRecord* CredentialStore::find(const std::string& provider) const {
  for (const auto& record : records_) {
    if (record.provider == provider) return &record;
  }
  return nullptr;
}

std::string PcrReport::render() const {
  std::ostringstream out;
  out << "Privacy Credential Report: " << provider << "\n";
  out << "reputation: " << (reputation ? formatDouble(*reputation) : "NA") << "\n";
  for (const auto& [statement, value] : statements) {
    out << "  [" << (value ? "x" : " ") << "] " << statement << "\n";
  }
  out << "credits: high " << credits.high << ", medium " << credits.medium
      << ", low " << credits.low << "\n";
  out << "conclusion: " << toString(rating.label) << " (phi "
      << formatDouble(rating.phi) << ")\n";
  out << "stars: " << formatDouble(rating.stars) << "\n";
  return out.str();
}

PcrReport buildReport(const CredentialStore& store, const std::string& provider) {
  const CredentialRecord* record = store.find(provider);
  if (record == nullptr) {
    throw std::runtime_error("unknown provider: " + provider);
  }
  PcrReport report;
  report.provider = record->provider;
  report.reputation = record->reputation;
  const auto& attributes = store.catalog().attributes();
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    report.statements.emplace_back(attributes[i].statement, record->values[i]);
  }
  report.credits = countCredits(store.catalog(), *record);
  report.rating = ratePrivacy(report.credits, store.catalog());
  return report;
}

}  // namespace dmarket
