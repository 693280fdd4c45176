#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "localnews/stamper.hpp"
#include "localnews/synth.hpp"

using namespace localnews;

namespace {

CandidateSets make_cands(std::optional<std::set<std::string>> pub,
                         std::vector<std::pair<std::string, std::string>> lt,
                         std::vector<std::pair<std::string, Confidence>> bma) {
  CandidateSets c;
  if (pub) {
    c.pub.emplace();
    for (const auto& g : *pub) c.pub->insert(Geohash(g));
  }
  for (const auto& [g, loc] : lt) c.lt[Geohash(g)].insert(loc);
  for (const auto& [g, conf] : bma) c.bma[Geohash(g)] = conf;
  return c;
}

std::set<std::string> texts(const std::set<Geohash>& cells) {
  std::set<std::string> out;
  for (const auto& gh : cells) out.insert(gh.text());
  return out;
}

}  // namespace

TEST_CASE("pub with corroborated LT stamps both (rules 1 and 2)") {
  const auto result = stamp("a", make_cands({{"c23n"}}, {{"c22y", "sammamish"}}, {}));
  CHECK(texts(result.geohashes) == std::set<std::string>{"c23n", "c22y"});
  CHECK(result.rules_fired == std::set<int>{1, 2});
  CHECK(result.provenance.at(Geohash("c23n")) == std::set<Source>{Source::Pub});
  CHECK(result.provenance.at(Geohash("c22y")) == std::set<Source>{Source::Lt});
}

TEST_CASE("rule 5 keeps only high-confidence geocoder cells") {
  const auto result = stamp("a", make_cands(std::nullopt, {},
                                            {{"c23n", Confidence::High},
                                             {"9q5c", Confidence::Medium}}));
  CHECK(texts(result.geohashes) == std::set<std::string>{"c23n"});
  CHECK(result.rules_fired == std::set<int>{5});
}

TEST_CASE("uncorroborated LT stamps nothing (rule 6)") {
  const auto result =
      stamp("a", make_cands(std::nullopt, {{"c22y", "x"}}, {{"9q5c", Confidence::High}}));
  CHECK(result.geohashes.empty());
  CHECK(result.rules_fired == std::set<int>{6});
  CHECK(result.provenance.empty());
}

TEST_CASE("LT and geocoder prefix agreement stamps the union (rule 4)") {
  const auto result =
      stamp("a", make_cands(std::nullopt, {{"c22y", "x"}}, {{"c23n", Confidence::High}}));
  CHECK(texts(result.geohashes) == std::set<std::string>{"c22y", "c23n"});
  CHECK(result.rules_fired == std::set<int>{4});
  CHECK(result.provenance.at(Geohash("c22y")) == std::set<Source>{Source::Lt});
  CHECK(result.provenance.at(Geohash("c23n")) == std::set<Source>{Source::Bma});
}

TEST_CASE("pub without any prefix agreement stamps pub alone (rule 1)") {
  const auto result = stamp(
      "a", make_cands({{"9q5c"}}, {{"c22y", "x"}}, {{"c23n", Confidence::Medium}}));
  CHECK(texts(result.geohashes) == std::set<std::string>{"9q5c"});
  CHECK(result.rules_fired == std::set<int>{1});
}

TEST_CASE("twelve-case rule table") {
  struct Case {
    const char* name;
    CandidateSets cands;
    std::set<std::string> stamped;
    std::set<int> rules;
  };
  const Case cases[] = {
      {"r1 fires alone", make_cands({{"c23n"}}, {}, {}), {"c23n"}, {1}},
      {"r1 cannot fire without pub",
       make_cands(std::nullopt, {{"c22y", "x"}}, {{"c2h8", Confidence::Medium}}),
       {"c22y", "c2h8"},
       {4}},
      {"r2 fires with prefix agreement", make_cands({{"c23n"}}, {{"c22y", "s"}}, {}),
       {"c23n", "c22y"},
       {1, 2}},
      {"r2 silent without agreement",
       make_cands({{"9q5c"}}, {{"c22y", "x"}}, {}),
       {"9q5c"},
       {1}},
      {"r3 fires for medium click",
       make_cands({{"c23n"}}, {}, {{"c2h8", Confidence::Medium}}),
       {"c23n", "c2h8"},
       {1, 3}},
      {"r3 ignores low confidence",
       make_cands({{"c23n"}}, {}, {{"c2h8", Confidence::Low}}),
       {"c23n"},
       {1}},
      {"r4 stamps the union",
       make_cands(std::nullopt, {{"c22y", "x"}}, {{"c23n", Confidence::High}}),
       {"c22y", "c23n"},
       {4}},
      {"r4 silent without agreement is rule 6",
       make_cands(std::nullopt, {{"c22y", "x"}}, {{"9q5c", Confidence::High}}),
       {},
       {6}},
      {"r5 stamps high only",
       make_cands(std::nullopt, {}, {{"c23n", Confidence::High}, {"9q5c", Confidence::Medium}}),
       {"c23n"},
       {5}},
      {"r5 with medium only is rule 6",
       make_cands(std::nullopt, {}, {{"9q5c", Confidence::Medium}}),
       {},
       {6}},
      {"nothing at all is rule 6", make_cands(std::nullopt, {}, {}), {}, {6}},
      {"rules 1+2+3 together",
       make_cands({{"c23n"}}, {{"c22y", "x"}},
                  {{"c2h8", Confidence::High}, {"9q5c", Confidence::Low}}),
       {"c23n", "c22y", "c2h8"},
       {1, 2, 3}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.name);
    const auto result = stamp("a", c.cands);
    CHECK(texts(result.geohashes) == c.stamped);
    CHECK(result.rules_fired == c.rules);
  }
}

TEST_CASE("provenance marks every set containing the cell among fired rules") {
  // The same cell in pub, lt and bma with all three rules firing.
  auto cands = make_cands({{"c23n"}}, {{"c23n", "x"}, {"c22y", "y"}},
                          {{"c23n", Confidence::High}});
  const auto result = stamp("a", cands);
  CHECK(result.rules_fired == std::set<int>{1, 2, 3});
  CHECK(result.provenance.at(Geohash("c23n")) ==
        std::set<Source>{Source::Pub, Source::Lt, Source::Bma});
  CHECK(result.provenance.at(Geohash("c22y")) == std::set<Source>{Source::Lt});
}

TEST_CASE("empty pub set behaves as absent") {
  CandidateSets cands = make_cands(std::set<std::string>{}, {}, {{"c23n", Confidence::High}});
  const auto result = stamp("a", cands);
  CHECK(result.rules_fired == std::set<int>{5});
}

TEST_CASE("candidate geohashes must have length four") {
  CHECK_THROWS_AS(stamp("a", make_cands({{"c23"}}, {}, {})), ValidationError);
  CHECK_THROWS_AS(stamp("a", make_cands(std::nullopt, {{"c2", "x"}}, {})), ValidationError);
  CHECK_THROWS_AS(
      stamp("a", make_cands(std::nullopt, {}, {{"c23n5", Confidence::High}})),
      ValidationError);
}

TEST_CASE("prefix length is configurable") {
  // At prefix 3 the pair c23n/c22y no longer agrees.
  const auto strict = stamp("a", make_cands({{"c23n"}}, {{"c22y", "s"}}, {}), 3);
  CHECK(strict.rules_fired == std::set<int>{1});
  const auto loose = stamp("a", make_cands({{"c23n"}}, {{"c22y", "s"}}, {}), 1);
  CHECK(loose.rules_fired == std::set<int>{1, 2});
  CHECK_THROWS_AS(stamp("a", make_cands({{"c23n"}}, {}, {}), 0), ValidationError);
  CHECK_THROWS_AS(stamp("a", make_cands({{"c23n"}}, {}, {}), 5), ValidationError);
}

TEST_CASE("random property: stamps never invent cells and pub always included") {
  SplitMix64 rng(41);
  const char* pool[] = {"c23n", "c22y", "c2h8", "9q5c", "9q5d", "dn5b", "dn5c", "9x1b"};
  for (int i = 0; i < 500; ++i) {
    CandidateSets cands;
    std::set<std::string> universe;
    if (rng.uniform() < 0.5) {
      cands.pub.emplace();
      const int n = static_cast<int>(rng.range(1, 3));
      for (int k = 0; k < n; ++k) {
        const std::string g = pool[rng.range(0, 7)];
        cands.pub->insert(Geohash(g));
        universe.insert(g);
      }
    }
    for (int k = 0, n = static_cast<int>(rng.range(0, 3)); k < n; ++k) {
      const std::string g = pool[rng.range(0, 7)];
      cands.lt[Geohash(g)].insert("loc");
      universe.insert(g);
    }
    for (int k = 0, n = static_cast<int>(rng.range(0, 3)); k < n; ++k) {
      const std::string g = pool[rng.range(0, 7)];
      cands.bma[Geohash(g)] = static_cast<Confidence>(rng.range(0, 2));
      universe.insert(g);
    }
    const auto result = stamp("a", cands);

    for (const auto& gh : result.geohashes) {
      CHECK(universe.count(gh.text()) == 1);
      CHECK_FALSE(result.provenance.at(gh).empty());
    }
    if (cands.pub && !cands.pub->empty()) {
      for (const auto& gh : *cands.pub) CHECK(result.geohashes.count(gh) == 1);
      CHECK(result.rules_fired.count(1) == 1);
    }
    CHECK((result.geohashes.empty() == (result.rules_fired == std::set<int>{6})));

    // Rule independence: removing bma candidates never changes R1/R2.
    CandidateSets no_bma = cands;
    no_bma.bma.clear();
    const auto reduced = stamp("a", no_bma);
    CHECK((reduced.rules_fired.count(1) == 1) == (result.rules_fired.count(1) == 1));
    CHECK((reduced.rules_fired.count(2) == 1) == (result.rules_fired.count(2) == 1));
  }
}
