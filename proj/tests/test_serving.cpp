#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "localnews/metrics.hpp"
#include "localnews/serialization.hpp"
#include "localnews/serving.hpp"
#include "localnews/synth.hpp"
#include "testutil.hpp"

using namespace localnews;

namespace {

Article art(const std::string& id, std::int64_t ts) {
  Article a;
  a.id = id;
  a.title = "t";
  a.body = "b";
  a.publisher = "p";
  a.published_at = ts;
  return a;
}

StampResult stamped(const std::string& id, std::initializer_list<const char*> cells) {
  StampResult s;
  s.article_id = id;
  for (const char* c : cells) {
    s.geohashes.insert(Geohash(c));
    s.provenance[Geohash(c)].insert(Source::Lt);
  }
  s.rules_fired = cells.size() ? std::set<int>{2} : std::set<int>{6};
  return s;
}

// Seattle-ish cell c23n and a neighbour c23q; 9q5c is far away (LA-ish).
const LatLon kInsideC23n = decode_bbox(Geohash("c23n")).center();

}  // namespace

TEST_CASE("build_index") {
  SUBCASE("no stamps, empty index") {
    CHECK(build_index({}, {}).postings.empty());
  }

  SUBCASE("an article stamped twice appears in both postings") {
    const auto index = build_index({stamped("a1", {"c23n", "c22y"})}, {art("a1", 100)});
    CHECK(index.postings.at(Geohash("c23n")).size() == 1);
    CHECK(index.postings.at(Geohash("c22y")).size() == 1);
  }

  SUBCASE("newer articles rank first, ties break by id") {
    const auto index = build_index(
        {stamped("b", {"c23n"}), stamped("a", {"c23n"}), stamped("c", {"c23n"})},
        {art("a", 100), art("b", 200), art("c", 100)});
    const auto& list = index.postings.at(Geohash("c23n"));
    REQUIRE(list.size() == 3);
    CHECK(list[0].article_id == "b");
    CHECK(list[1].article_id == "a");
    CHECK(list[2].article_id == "c");
  }

  SUBCASE("dangling stamp is an error naming the id") {
    try {
      build_index({stamped("ghost", {"c23n"})}, {});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
  }
}

TEST_CASE("serve") {
  std::vector<Article> articles;
  std::vector<StampResult> stamps;
  for (int i = 0; i < 6; ++i) {
    const std::string id = "local-" + std::to_string(i);
    articles.push_back(art(id, 1000 + i));
    stamps.push_back(stamped(id, {"c23n"}));
  }
  for (int i = 0; i < 4; ++i) {
    const std::string id = "city-" + std::to_string(i);
    articles.push_back(art(id, 2000 + i));
    stamps.push_back(stamped(id, {"c23q"}));
  }
  const FeedIndex index = build_index(stamps, articles);
  const std::vector<PopularCity> cities{
      PopularCity("Seatport", decode_bbox(Geohash("c23q")).center()),
      PopularCity("Farville", decode_bbox(Geohash("9q5c")).center()),
  };

  SUBCASE("sufficient local supply serves locally") {
    const auto feed = serve(kInsideC23n, 4, index, cities, 3);
    CHECK(feed.source == FeedResponse::SourceKind::Local);
    CHECK_FALSE(feed.backfill_city.has_value());
    REQUIRE(feed.articles.size() == 4);
    CHECK(feed.articles[0] == "local-5");  // newest first
    CHECK(feed.user_geohash.text() == "c23n");
  }

  SUBCASE("empty cell backfills from the nearest popular city") {
    const LatLon user = decode_bbox(Geohash("c23r")).center();  // no postings there
    const auto feed = serve(user, 3, index, cities, 3);
    CHECK(feed.source == FeedResponse::SourceKind::Backfill);
    CHECK(*feed.backfill_city == "Seatport");
    REQUIRE(feed.articles.size() == 3);
    CHECK(feed.articles[0] == "city-3");
  }

  SUBCASE("thin local supply keeps local articles first, deduplicated") {
    std::vector<StampResult> thin = stamps;
    // One local article also stamped on the backfill cell.
    thin[0] = stamped("local-0", {"c23w", "c23q"});
    for (int i = 1; i < 6; ++i) thin[i] = stamped(stamps[i].article_id, {"c22y"});
    const FeedIndex idx = build_index(thin, articles);
    const LatLon user = decode_bbox(Geohash("c23w")).center();
    const auto feed = serve(user, 4, idx, cities, 3);
    CHECK(feed.source == FeedResponse::SourceKind::Backfill);
    REQUIRE(feed.articles.size() == 4);
    CHECK(feed.articles[0] == "local-0");
    // local-0 must not repeat even though it is in the backfill list too.
    for (std::size_t i = 1; i < feed.articles.size(); ++i) {
      CHECK(feed.articles[i] != "local-0");
    }
  }

  SUBCASE("empty index and empty city postings is an empty backfill, not an error") {
    const FeedIndex empty;
    const auto feed = serve(kInsideC23n, 5, empty, cities, 3);
    CHECK(feed.source == FeedResponse::SourceKind::Backfill);
    CHECK(feed.articles.empty());
  }

  SUBCASE("count and city-list validation") {
    CHECK_THROWS_AS(serve(kInsideC23n, 0, index, cities, 3), ValidationError);
    const LatLon user = decode_bbox(Geohash("c23r")).center();
    CHECK_THROWS_AS(serve(user, 3, index, {}, 3), ValidationError);
    // No backfill needed: the empty city list is never consulted.
    CHECK(serve(kInsideC23n, 3, index, {}, 3).source == FeedResponse::SourceKind::Local);
  }

  SUBCASE("nearest city matches a brute-force scan and ties break by name") {
    const LatLon user = decode_bbox(Geohash("c23r")).center();
    const PopularCity* best = nullptr;
    double best_d = 0;
    for (const auto& c : cities) {
      const double d = haversine_km(user, c.point);
      if (!best || d < best_d || (d == best_d && c.name < best->name)) {
        best = &c;
        best_d = d;
      }
    }
    const auto feed = serve(user, 3, index, cities, 3);
    CHECK(*feed.backfill_city == best->name);

    std::vector<PopularCity> tied{PopularCity("Zed", user), PopularCity("Alpha", user)};
    const auto tie_feed = serve(user, 3, index, tied, 3);
    CHECK(*tie_feed.backfill_city == "Alpha");
  }

  SUBCASE("local source articles always carry the user cell in their stamp") {
    std::map<std::string, const StampResult*> by_id;
    for (const auto& s : stamps) by_id.emplace(s.article_id, &s);
    const auto feed = serve(kInsideC23n, 6, index, cities, 3);
    REQUIRE(feed.source == FeedResponse::SourceKind::Local);
    for (const auto& id : feed.articles) {
      CHECK(by_id.at(id)->geohashes.count(feed.user_geohash) == 1);
    }
  }

  SUBCASE("serve is deterministic") {
    const auto a = feed_response_to_json(serve(kInsideC23n, 4, index, cities, 3));
    const auto b = feed_response_to_json(serve(kInsideC23n, 4, index, cities, 3));
    CHECK(a == b);
  }
}

TEST_CASE("popular city invariant and file round trip") {
  const PopularCity city("Seatport", LatLon(47.6, -122.33));
  CHECK(city.geohash4 == encode(city.point, 4));

  testutil::TempDir dir("cities");
  write_cities(dir.path("c.tsv"), {city, PopularCity("Other", LatLon(10, 10))});
  const auto loaded = load_cities(dir.path("c.tsv"));
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].name == "Seatport");
  CHECK(loaded[0].geohash4 == city.geohash4);

  testutil::write_file(dir.path("bad.tsv"), "OnlyName\n");
  CHECK_THROWS_AS(load_cities(dir.path("bad.tsv")), ValidationError);
}
