#include "dmarket/ontology.hpp"

#include <cctype>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "text_io.hpp"

namespace dmarket {

namespace {

std::string foldName(const std::string& raw) {
  std::size_t begin = 0;
  std::size_t end = raw.size();
  auto isSpace = [](unsigned char c) { return std::isspace(c) != 0; };
  while (begin < end && isSpace(raw[begin])) ++begin;
  while (end > begin && isSpace(raw[end - 1])) --end;
  std::string folded;
  folded.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    folded += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i])));
  }
  return folded;
}

[[noreturn]] void fail(const std::string& message) {
  throw std::runtime_error("ontology: " + message);
}

}  // namespace

Ontology Ontology::fromJsonFile(const std::string& path) {
  return fromJsonText(detail::readTextFile(path));
}

Ontology Ontology::fromJsonText(const std::string& text) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(std::string("bad JSON: ") + e.what());
  }

  Ontology ontology;
  if (doc.contains("equivalence_sets")) {
    for (const auto& entry : doc.at("equivalence_sets")) {
      EquivalenceSet set;
      for (const auto& member : entry) {
        set.members.push_back(member.get<std::string>());
      }
      if (set.members.empty()) fail("empty equivalence set");
      ontology.sets_.push_back(std::move(set));
    }
  }
  for (const auto& categoryDoc : doc.at("categories")) {
    CategorySchema category;
    category.name = categoryDoc.at("name").get<std::string>();
    for (const auto& subsetDoc : categoryDoc.at("subsets")) {
      SubsetSchema subset;
      subset.name = subsetDoc.at("name").get<std::string>();
      for (const auto& attribute : subsetDoc.at("attributes")) {
        subset.attributes.push_back(attribute.get<std::string>());
      }
      category.subsets.push_back(std::move(subset));
    }
    ontology.categories_.push_back(std::move(category));
  }
  ontology.buildIndex();
  return ontology;
}

void Ontology::buildIndex() {
  if (categories_.empty()) fail("no categories");

  std::set<std::string> categoryNames;
  for (std::size_t c = 0; c < categories_.size(); ++c) {
    const auto& category = categories_[c];
    if (category.name.empty()) fail("unnamed category");
    if (!categoryNames.insert(foldName(category.name)).second) {
      fail("duplicate category name: " + category.name);
    }
    if (category.subsets.empty()) fail("category has no subsets: " + category.name);
    std::set<std::string> subsetNames;
    for (std::size_t s = 0; s < category.subsets.size(); ++s) {
      const auto& subset = category.subsets[s];
      if (subset.name.empty()) fail("unnamed subset in category " + category.name);
      if (!subsetNames.insert(foldName(subset.name)).second) {
        fail("duplicate subset name in category " + category.name + ": " + subset.name);
      }
      if (subset.attributes.empty()) {
        fail("subset has no attributes: " + category.name + "/" + subset.name);
      }
      for (const auto& attribute : subset.attributes) {
        if (attribute.empty()) fail("empty attribute name");
        auto inserted = locationByCanonical_.emplace(attribute, Location{c, s});
        if (!inserted.second) {
          fail("attribute appears in two subsets: " + attribute);
        }
      }
    }
  }

  // Every substitution-class head must be a schema attribute, and no raw
  // name may resolve two ways.
  for (const auto& set : sets_) {
    if (locationByCanonical_.find(set.canonical()) == locationByCanonical_.end()) {
      fail("equivalence set head is not a schema attribute: " + set.canonical());
    }
    for (const auto& member : set.members) {
      if (member.empty()) fail("empty member in equivalence set " + set.canonical());
      auto inserted = canonicalByFoldedMember_.emplace(foldName(member), set.canonical());
      if (!inserted.second && inserted.first->second != set.canonical()) {
        fail("name appears in two equivalence sets: " + member);
      }
    }
  }

  // Schema attributes not covered by any set become singleton sets, so
  // every attribute is resolvable under its own name.
  for (const auto& category : categories_) {
    for (const auto& subset : category.subsets) {
      for (const auto& attribute : subset.attributes) {
        std::string folded = foldName(attribute);
        auto it = canonicalByFoldedMember_.find(folded);
        if (it == canonicalByFoldedMember_.end()) {
          sets_.push_back(EquivalenceSet{{attribute}});
          canonicalByFoldedMember_.emplace(folded, attribute);
        } else if (it->second != attribute) {
          fail("attribute name already resolves elsewhere: " + attribute);
        }
      }
    }
  }
}

std::optional<std::string> Ontology::canonicalize(const std::string& raw) const {
  auto it = canonicalByFoldedMember_.find(foldName(raw));
  if (it == canonicalByFoldedMember_.end()) return std::nullopt;
  return it->second;
}

std::optional<Ontology::Location> Ontology::locate(const std::string& canonical) const {
  auto it = locationByCanonical_.find(canonical);
  if (it == locationByCanonical_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> Profile::subsetCounts() const {
  std::vector<int> counts;
  counts.reserve(categories.size());
  for (const auto& category : categories) {
    counts.push_back(static_cast<int>(category.subsets.size()));
  }
  return counts;
}

Profile categorize(const Ontology& ontology, const FieldList& fields) {
  const auto& schema = ontology.categories();

  // Staging tree over the full schema; compressed afterwards.
  std::vector<std::vector<std::vector<ProfileItem>>> staged(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) {
    staged[c].resize(schema[c].subsets.size());
  }

  Profile profile;
  for (const auto& [rawName, value] : fields) {
    auto canonical = ontology.canonicalize(rawName);
    if (!canonical) {
      profile.rejectedFields.push_back(rawName);
      continue;
    }
    auto location = ontology.locate(*canonical);
    if (!location) {
      // Unreachable for a validated ontology; kept as a guard.
      profile.rejectedFields.push_back(rawName);
      continue;
    }
    auto& bucket = staged[location->category][location->subset];
    bool duplicate = false;
    for (const auto& item : bucket) {
      if (item.attribute == *canonical) duplicate = true;
    }
    if (!duplicate) bucket.push_back(ProfileItem{*canonical, value});
  }

  for (std::size_t c = 0; c < schema.size(); ++c) {
    ProfileCategory category;
    category.name = schema[c].name;
    for (std::size_t s = 0; s < schema[c].subsets.size(); ++s) {
      if (staged[c][s].empty()) continue;
      category.subsets.push_back(
          ProfileSubset{schema[c].subsets[s].name, std::move(staged[c][s])});
    }
    if (!category.subsets.empty()) profile.categories.push_back(std::move(category));
  }
  return profile;
}

RequestMatch matchRequest(const Ontology& ontology, const Profile& profile,
                          const std::vector<std::string>& requestedFields) {
  RequestMatch match;
  match.alpha.assign(profile.categories.size(), 0);

  std::set<std::pair<std::size_t, std::size_t>> touched;
  for (const auto& raw : requestedFields) {
    auto canonical = ontology.canonicalize(raw);
    if (!canonical) {
      match.rejectedFields.push_back(raw);
      continue;
    }
    for (std::size_t c = 0; c < profile.categories.size(); ++c) {
      const auto& category = profile.categories[c];
      for (std::size_t s = 0; s < category.subsets.size(); ++s) {
        for (const auto& item : category.subsets[s].items) {
          if (item.attribute == *canonical) touched.emplace(c, s);
        }
      }
    }
  }
  for (const auto& [c, s] : touched) {
    match.alpha[c] += 1;
  }
  return match;
}

std::vector<Account> loadAccounts(const std::string& path) {
  std::string text = detail::readTextFile(path);
  std::vector<Account> accounts;
  std::set<std::string> seen;
  std::istringstream lines(text);
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(lines, line)) {
    ++lineNo;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::ordered_json doc;
    try {
      doc = nlohmann::ordered_json::parse(line);
    } catch (const std::exception& e) {
      throw std::runtime_error("accounts line " + std::to_string(lineNo) +
                               ": bad JSON: " + e.what());
    }
    Account account;
    account.consumerId = doc.at("consumer_id").get<std::string>();
    if (account.consumerId.empty()) {
      throw std::runtime_error("accounts line " + std::to_string(lineNo) +
                               ": empty consumer_id");
    }
    if (!seen.insert(account.consumerId).second) {
      throw std::runtime_error("duplicate consumer id: " + account.consumerId);
    }
    for (const auto& [key, value] : doc.at("fields").items()) {
      account.fields.emplace_back(
          key, value.is_string() ? value.get<std::string>() : value.dump());
    }
    if (doc.contains("risk_weights")) {
      for (const auto& [context, weights] : doc.at("risk_weights").items()) {
        std::map<std::string, double> byCategory;
        for (const auto& [category, weight] : weights.items()) {
          byCategory[category] = weight.get<double>();
        }
        account.riskWeights[context] = std::move(byCategory);
      }
    }
    accounts.push_back(std::move(account));
  }
  return accounts;
}

}  // namespace dmarket
