#include <doctest.h>

#include <fstream>
#include <stdexcept>

#include "dmarket/ontology.hpp"
#include "helpers.hpp"

using namespace dmarket;

namespace {

Ontology shipped() { return Ontology::fromJsonFile(testutil::dataPath("ontology.json")); }

}  // namespace

TEST_CASE("raw field names resolve through their substitution class") {
  Ontology ontology = shipped();
  CHECK(ontology.canonicalize("HomePhone") == std::string("Home Phone"));
  CHECK(ontology.canonicalize("  personal e-mail ") == std::string("Personal Email"));
  CHECK(ontology.canonicalize("FOOTBALL") == std::string("Soccer"));
  CHECK(ontology.canonicalize("Income") == std::string("Salary"));
  CHECK(ontology.canonicalize("Surname") == std::string("FamilyName"));
  // Attributes outside every set still resolve to themselves.
  CHECK(ontology.canonicalize("gender") == std::string("Gender"));
  CHECK(!ontology.canonicalize("Shoe Size").has_value());
}

TEST_CASE("categorization builds the pruned category tree") {
  Ontology ontology = shipped();
  FieldList fields{{"Home Phone", "1"}, {"Personal Email", "a@x"},
                   {"Ogame", "u"},      {"Soccer", "fan"},
                   {"Salary", "1000"},  {"Shoe Size", "43"}};
  Profile profile = categorize(ontology, fields);

  REQUIRE(profile.categories.size() == 3);
  CHECK(profile.categories[0].name == "Contact");
  CHECK(profile.categories[1].name == "Hobbies");
  CHECK(profile.categories[2].name == "Income");
  CHECK(profile.subsetCounts() == std::vector<int>{2, 2, 1});
  REQUIRE(profile.rejectedFields.size() == 1);
  CHECK(profile.rejectedFields[0] == "Shoe Size");
}

TEST_CASE("variant names land in the same cells as canonical ones") {
  Ontology ontology = shipped();
  FieldList fields{{"HomePhone", "1"},
                   {"Personal E-mail", "b@x"},
                   {"Hattrick", "u"},
                   {"Football", "gk"},
                   {"Income", "2000"}};
  Profile profile = categorize(ontology, fields);
  CHECK(profile.subsetCounts() == std::vector<int>{2, 2, 1});
  CHECK(profile.rejectedFields.empty());
  // The stored item carries the canonical attribute name.
  CHECK(profile.categories[0].subsets[0].items[0].attribute == "Home Phone");
}

TEST_CASE("duplicate resolutions collapse to the first value") {
  Ontology ontology = shipped();
  FieldList fields{{"Salary", "100"}, {"Income", "200"}};
  Profile profile = categorize(ontology, fields);
  REQUIRE(profile.categories.size() == 1);
  REQUIRE(profile.categories[0].subsets.size() == 1);
  REQUIRE(profile.categories[0].subsets[0].items.size() == 1);
  CHECK(profile.categories[0].subsets[0].items[0].value == "100");
}

TEST_CASE("request matching counts touched subsets per category") {
  Ontology ontology = shipped();
  FieldList fields{{"Home Phone", "1"}, {"Personal Email", "a@x"},
                   {"Ogame", "u"},      {"Soccer", "fan"},
                   {"Salary", "1000"}};
  Profile profile = categorize(ontology, fields);

  RequestMatch match = matchRequest(
      ontology, profile, {"Home Phone", "Personal Email", "Soccer", "Salary"});
  CHECK(match.alpha == std::vector<int>{2, 1, 1});
  CHECK(match.rejectedFields.empty());

  // Requests for attributes the profile lacks contribute nothing.
  RequestMatch sparse = matchRequest(ontology, profile, {"Work Phone"});
  CHECK(sparse.alpha == std::vector<int>{0, 0, 0});

  // Unknown names are reported, not dropped silently.
  RequestMatch junk = matchRequest(ontology, profile, {"Blood Type"});
  REQUIRE(junk.rejectedFields.size() == 1);
  CHECK(junk.rejectedFields[0] == "Blood Type");

  // Variant spellings in the request resolve before matching.
  RequestMatch variant = matchRequest(ontology, profile, {"Football", "Income"});
  CHECK(variant.alpha == std::vector<int>{0, 1, 1});
}

TEST_CASE("shipped account store categorizes as designed") {
  Ontology ontology = shipped();
  std::vector<Account> accounts = loadAccounts(testutil::dataPath("accounts.jsonl"));
  REQUIRE(accounts.size() == 3);
  CHECK(accounts[0].consumerId == "alice");
  CHECK(accounts[1].consumerId == "bob");
  CHECK(accounts[2].consumerId == "carol");

  Profile alice = categorize(ontology, accounts[0].fields);
  CHECK(alice.subsetCounts() == std::vector<int>{2, 2, 1});
  Profile bob = categorize(ontology, accounts[1].fields);
  CHECK(bob.subsetCounts() == std::vector<int>{2, 2, 1});
  Profile carol = categorize(ontology, accounts[2].fields);
  CHECK(carol.subsetCounts() == std::vector<int>{2, 2, 2, 1, 1, 3});
  CHECK(carol.categories[0].name == "Personal-ID");
  CHECK(carol.categories[5].name == "Shopping-Preferences");

  const auto& aliceWeights = accounts[0].riskWeights.at("sportsworld.com");
  CHECK(aliceWeights.at("Contact") == 0.1);
  CHECK(aliceWeights.at("Hobbies") == 0.2);
  CHECK(aliceWeights.at("Income") == 0.2);
  CHECK(accounts[0].riskWeights.count("Circuitcity.com") == 1);
}

TEST_CASE("malformed ontologies are rejected") {
  CHECK_THROWS_AS(Ontology::fromJsonText("{"), std::runtime_error);
  CHECK_THROWS_AS(Ontology::fromJsonText(R"({"categories": []})"),
                  std::runtime_error);
  // Same attribute in two subsets.
  CHECK_THROWS_AS(Ontology::fromJsonText(R"({
    "categories": [{"name": "A", "subsets": [
      {"name": "s1", "attributes": ["x"]},
      {"name": "s2", "attributes": ["x"]}]}]})"),
                  std::runtime_error);
  // Equivalence head that is not a schema attribute.
  CHECK_THROWS_AS(Ontology::fromJsonText(R"({
    "equivalence_sets": [["ghost", "x"]],
    "categories": [{"name": "A", "subsets": [
      {"name": "s1", "attributes": ["x"]}]}]})"),
                  std::runtime_error);
  // One raw name claimed by two sets.
  CHECK_THROWS_AS(Ontology::fromJsonText(R"({
    "equivalence_sets": [["x", "shared"], ["y", "shared"]],
    "categories": [{"name": "A", "subsets": [
      {"name": "s1", "attributes": ["x", "y"]}]}]})"),
                  std::runtime_error);
  // A schema attribute hijacked by another attribute's set.
  CHECK_THROWS_AS(Ontology::fromJsonText(R"({
    "equivalence_sets": [["x", "y"]],
    "categories": [{"name": "A", "subsets": [
      {"name": "s1", "attributes": ["x", "y"]}]}]})"),
                  std::runtime_error);
  // Duplicate category names.
  CHECK_THROWS_AS(Ontology::fromJsonText(R"({
    "categories": [
      {"name": "A", "subsets": [{"name": "s", "attributes": ["x"]}]},
      {"name": "a", "subsets": [{"name": "s", "attributes": ["y"]}]}]})"),
                  std::runtime_error);
}

TEST_CASE("account loader rejects duplicates and coerces values") {
  testutil::TempDir dir("accounts");
  {
    std::ofstream out(dir.file("dup.jsonl"));
    out << R"({"consumer_id": "a", "fields": {"Salary": 42}})" << "\n";
    out << R"({"consumer_id": "a", "fields": {"Salary": "1"}})" << "\n";
  }
  CHECK_THROWS_WITH_AS(loadAccounts(dir.file("dup.jsonl")),
                       "duplicate consumer id: a", std::runtime_error);

  {
    std::ofstream out(dir.file("coerce.jsonl"));
    out << R"({"consumer_id": "a", "fields": {"Salary": 42}})" << "\n";
  }
  std::vector<Account> accounts = loadAccounts(dir.file("coerce.jsonl"));
  REQUIRE(accounts.size() == 1);
  REQUIRE(accounts[0].fields.size() == 1);
  CHECK(accounts[0].fields[0].second == "42");
}
