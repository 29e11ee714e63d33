#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dmarket {

enum class PrivacyLevel { Low, Medium, High };

/// One practice tracked about a provider. A negative-polarity attribute
/// earns credit when its recorded value is false (the provider does NOT do
/// the thing); a positive one earns credit when true.
struct CatalogAttribute {
  std::string name;       // stable key, used as the CSV column name
  std::string statement;  // sentence shown on the report
  PrivacyLevel level;
  bool negativePolarity = false;
};

/// The set of practices a credential store records. Attribute names are
/// unique and each attribute carries exactly one privacy level.
class AttributeCatalog {
 public:
  AttributeCatalog() = default;
  explicit AttributeCatalog(std::vector<CatalogAttribute> attributes);

  /// The ten-column catalog shipped with the engine.
  static AttributeCatalog standard();

  const std::vector<CatalogAttribute>& attributes() const { return attributes_; }
  int levelSize(PrivacyLevel level) const;

 private:
  std::vector<CatalogAttribute> attributes_;
};

/// Recorded practice values for one provider.
struct CredentialRecord {
  std::string provider;
  std::optional<double> reputation;  // absent when the source row was blank
  std::vector<bool> values;          // aligned with catalog attributes
};

/// Credit-earning attribute counts per privacy level.
struct CreditCounts {
  int high = 0;
  int medium = 0;
  int low = 0;
};

CreditCounts countCredits(const AttributeCatalog& catalog,
                          const CredentialRecord& record);

enum class RatingLabel { VeryLow, Low, Medium, High, VeryHigh };

std::string toString(RatingLabel label);

/// Outcome of the fuzzy reliability inference.
///
/// mass[k] is the aggregated strength of conclusion k (VeryLow..VeryHigh);
/// the strengths always sum to 1. phi is the center-average defuzzified
/// score in [0, 1]; label is the strongest conclusion, ties resolved
/// toward the higher label; stars is phi snapped to the half-star scale.
struct RatingResult {
  std::array<double, 5> mass{};
  double phi = 0.0;
  RatingLabel label = RatingLabel::VeryLow;
  double stars = 0.0;
};

/// Runs the twelve-rule inference over credit counts. high/medium/low are
/// clamped against the catalog's level sizes by the caller; out-of-range
/// counts throw std::invalid_argument. Monotone: raising any count never
/// lowers phi.
RatingResult ratePrivacy(const CreditCounts& credits,
                         const AttributeCatalog& catalog);

/// Half-star rounding: floor(phi * 10 + 0.5) / 2, so phi = 1 gives 5.0.
double starsFromPhi(double phi);

/// Provider credential table with its catalog. CSV layout: header row
/// "provider,reputation" followed by one column per catalog attribute
/// name; values 0/1, reputation may be empty.
class CredentialStore {
 public:
  static CredentialStore fromCsvFile(const std::string& path,
                                     AttributeCatalog catalog);
  static CredentialStore fromCsvText(const std::string& text,
                                     AttributeCatalog catalog);

  /// Merge the rows of another store sharing the same catalog layout.
  /// Rows from the other store replace existing rows with the same provider
  /// name, so a later store acts as an override layer.
  void merge(const CredentialStore& other);

  const AttributeCatalog& catalog() const { return catalog_; }
  const std::vector<CredentialRecord>& records() const { return records_; }
  const CredentialRecord* find(const std::string& provider) const;

 private:
  AttributeCatalog catalog_;
  std::vector<CredentialRecord> records_;
};

/// Privacy credential report for one provider: the statement sheet plus
/// the inferred rating.
struct PcrReport {
  std::string provider;
  std::optional<double> reputation;
  std::vector<std::pair<std::string, bool>> statements;
  CreditCounts credits;
  RatingResult rating;

  std::string render() const;
};

/// Builds the report, or throws std::runtime_error("unknown provider: ...")
/// when the store has no row for the name.
PcrReport buildReport(const CredentialStore& store, const std::string& provider);

}  // namespace dmarket
