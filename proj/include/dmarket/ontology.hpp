#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dmarket {

/// A substitution class of attribute names. The first member is the
/// canonical name; every member (matched case-insensitively after trimming)
/// resolves to it.
struct EquivalenceSet {
  std::vector<std::string> members;

  const std::string& canonical() const { return members.front(); }
};

struct SubsetSchema {
  std::string name;
  std::vector<std::string> attributes;  // canonical names
};

struct CategorySchema {
  std::string name;
  std::vector<SubsetSchema> subsets;
};

/// Attribute ontology: a category / subset / attribute tree plus the
/// equivalence sets used to map free-form field names onto canonical
/// attributes. Loaded from JSON so tests can swap schemas.
class Ontology {
 public:
  static Ontology fromJsonFile(const std::string& path);
  static Ontology fromJsonText(const std::string& text);

  /// Resolve a raw field name to its canonical attribute, or nullopt if no
  /// equivalence set knows it.
  std::optional<std::string> canonicalize(const std::string& raw) const;

  /// Position of a canonical attribute in the schema.
  struct Location {
    std::size_t category;
    std::size_t subset;
  };
  std::optional<Location> locate(const std::string& canonical) const;

  const std::vector<CategorySchema>& categories() const { return categories_; }
  const std::vector<EquivalenceSet>& equivalenceSets() const { return sets_; }

 private:
  void buildIndex();  // throws std::runtime_error on a malformed ontology

  std::vector<CategorySchema> categories_;
  std::vector<EquivalenceSet> sets_;
  std::map<std::string, std::string> canonicalByFoldedMember_;
  std::map<std::string, Location> locationByCanonical_;
};

struct ProfileItem {
  std::string attribute;  // canonical name
  std::string value;
};

struct ProfileSubset {
  std::string name;
  std::vector<ProfileItem> items;
};

struct ProfileCategory {
  std::string name;
  std::vector<ProfileSubset> subsets;
};

/// Result of categorizing one consumer's account fields. Only categories
/// and subsets that received at least one item are kept, in schema order.
struct Profile {
  std::vector<ProfileCategory> categories;
  std::vector<std::string> rejectedFields;  // raw names no set resolves

  /// Number of populated subsets per category (the X vector).
  std::vector<int> subsetCounts() const;
};

using FieldList = std::vector<std::pair<std::string, std::string>>;

Profile categorize(const Ontology& ontology, const FieldList& fields);

/// Per-category count of distinct profile subsets touched by a data
/// request (the alpha vector), aligned with profile.categories.
struct RequestMatch {
  std::vector<int> alpha;
  std::vector<std::string> rejectedFields;
};

RequestMatch matchRequest(const Ontology& ontology, const Profile& profile,
                          const std::vector<std::string>& requestedFields);

/// One stored consumer account: raw registration fields plus per-context
/// risk weight vectors keyed by category name.
struct Account {
  std::string consumerId;
  FieldList fields;
  std::map<std::string, std::map<std::string, double>> riskWeights;
};

/// Loads a JSON-lines account store. Throws std::runtime_error on
/// malformed records or duplicate consumer ids.
std::vector<Account> loadAccounts(const std::string& path);

}  // namespace dmarket
