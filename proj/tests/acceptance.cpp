// Acceptance suite: runs every acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion.
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "localnews/app.hpp"
#include "localnews/serialization.hpp"
#include "localnews/service.hpp"
#include "localnews/synth.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace localnews;
using Clock = std::chrono::steady_clock;

namespace {

struct Harness {
  int failures = 0;

  void criterion(int number, const std::string& title, const std::function<bool(std::string&)>& body) {
    std::string detail;
    bool ok = false;
    try {
      ok = body(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", number, title.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    if (!ok) ++failures;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared end-to-end pipeline over the seeded synthetic world.
struct PipelineRun {
  testutil::TempDir dir{"acceptance"};
  AppConfig config;
  SynthWorld world;
  nlohmann::json truth;
  StampRun stamps;
  double eval_seconds = 0;
  EvalReport report;

  PipelineRun() : world(generate_world(42)) {
    const auto start = Clock::now();
    write_world(world, dir.root());
    config = AppConfig::load(dir.path("config.json"));
    std::ostringstream log;
    run_affinity(config, dir.path("publishers.txt"), log);
    stamps = run_stamp(config, log);
    report = run_eval(config, log);
    eval_seconds = seconds_since(start);
    truth = nlohmann::json::parse(world.truth_json);
  }
};

}  // namespace

int main() {
  Harness h;

  h.criterion(1, "geohash round trips: containment and re-encode stability, < 5 s",
              [](std::string& detail) {
                const auto start = Clock::now();
                SplitMix64 rng(1001);
                for (int i = 0; i < 10000; ++i) {
                  const LatLon p(-90.0 + rng.uniform() * 180.0, -180.0 + rng.uniform() * 360.0);
                  const int length = static_cast<int>(rng.range(1, 8));
                  const Geohash gh = encode(p, length);
                  const BoundingBox box = decode_bbox(gh);
                  if (!box.contains(p)) {
                    detail = "containment failed at iteration " + std::to_string(i);
                    return false;
                  }
                  if (!(encode(box.center(), length) == gh)) {
                    detail = "re-encode failed at iteration " + std::to_string(i);
                    return false;
                  }
                }
                const double elapsed = seconds_since(start);
                char buf[64];
                std::snprintf(buf, sizeof(buf), "10000 round trips in %.2f s", elapsed);
                detail = buf;
                return elapsed < 5.0;
              });

  h.criterion(2, "equatorial cell dimensions match the canonical cell-size table within 5%",
              [](std::string& detail) {
                const double rows[7][2] = {{5000, 5000}, {1250, 625},  {156, 156},
                                           {39.1, 19.5}, {4.89, 4.89}, {1.22, 0.61},
                                           {0.153, 0.153}};
                double worst = 0;
                for (int length = 1; length <= 7; ++length) {
                  const double width = cell_width_deg(length) * kKmPerDegree;
                  const double height = cell_height_deg(length) * kKmPerDegree;
                  const double we = std::abs(width - rows[length - 1][0]) / rows[length - 1][0];
                  const double he = std::abs(height - rows[length - 1][1]) / rows[length - 1][1];
                  worst = std::max({worst, we, he});
                }
                char buf[64];
                std::snprintf(buf, sizeof(buf), "worst relative error %.3f%%", 100 * worst);
                detail = buf;
                return worst < 0.05;
              });

  h.criterion(3, "cover equals brute-force enumeration on 100 random boxes",
              [](std::string& detail) {
                SplitMix64 rng(1003);
                for (int i = 0; i < 100; ++i) {
                  const double lat = -80.0 + rng.uniform() * 160.0;
                  const double lon = -170.0 + rng.uniform() * 340.0;
                  const BoundingBox box(lat, lon, std::min(90.0, lat + rng.uniform() * 0.8),
                                        std::min(180.0, lon + rng.uniform() * 1.6));
                  std::set<std::string> got;
                  for (const auto& gh : cover(box, 4)) got.insert(gh.text());
                  const auto expected =
                      oracles::oracle_cover({box.south, box.west, box.north, box.east}, 4);
                  if (got != expected) {
                    detail = "discrepancy on box " + std::to_string(i);
                    return false;
                  }
                }
                detail = "100 boxes, zero discrepancies";
                return true;
              });

  h.criterion(4, "stamping rule table: 12 hand-derived cases match exactly",
              [](std::string& detail) {
                struct Case {
                  const char* name;
                  CandidateSets cands;
                  std::set<std::string> stamped;
                  std::set<int> rules;
                };
                auto cands = [](std::optional<std::set<std::string>> pub,
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
                };
                const Case cases[] = {
                    {"r1 alone", cands({{"c23n"}}, {}, {}), {"c23n"}, {1}},
                    {"r1 needs pub", cands(std::nullopt, {{"c22y", "x"}},
                                           {{"c2h8", Confidence::Medium}}),
                     {"c22y", "c2h8"}, {4}},
                    {"r2 fires", cands({{"c23n"}}, {{"c22y", "s"}}, {}), {"c23n", "c22y"}, {1, 2}},
                    {"r2 needs prefix", cands({{"9q5c"}}, {{"c22y", "x"}},
                                              {{"c23n", Confidence::Medium}}),
                     {"9q5c"}, {1}},
                    {"r3 fires", cands({{"c23n"}}, {}, {{"c2h8", Confidence::Medium}}),
                     {"c23n", "c2h8"}, {1, 3}},
                    {"r3 skips low", cands({{"c23n"}}, {}, {{"c2h8", Confidence::Low}}),
                     {"c23n"}, {1}},
                    {"r4 fires", cands(std::nullopt, {{"c22y", "x"}},
                                       {{"c23n", Confidence::High}}),
                     {"c22y", "c23n"}, {4}},
                    {"r4 needs prefix -> r6", cands(std::nullopt, {{"c22y", "x"}},
                                                    {{"9q5c", Confidence::High}}),
                     {}, {6}},
                    {"r5 high only", cands(std::nullopt, {},
                                           {{"c23n", Confidence::High},
                                            {"9q5c", Confidence::Medium}}),
                     {"c23n"}, {5}},
                    {"r5 medium only -> r6", cands(std::nullopt, {},
                                                   {{"9q5c", Confidence::Medium}}),
                     {}, {6}},
                    {"r6 empty", cands(std::nullopt, {}, {}), {}, {6}},
                    {"r1+r2+r3", cands({{"c23n"}}, {{"c22y", "x"}},
                                       {{"c2h8", Confidence::High}, {"9q5c", Confidence::Low}}),
                     {"c23n", "c22y", "c2h8"}, {1, 2, 3}},
                };
                for (const auto& c : cases) {
                  const StampResult result = stamp("a", c.cands);
                  std::set<std::string> got;
                  for (const auto& gh : result.geohashes) got.insert(gh.text());
                  if (got != c.stamped || result.rules_fired != c.rules) {
                    detail = std::string("case failed: ") + c.name;
                    return false;
                  }
                  for (const auto& gh : result.geohashes) {
                    if (result.provenance.at(gh).empty()) {
                      detail = std::string("empty provenance in: ") + c.name;
                      return false;
                    }
                  }
                }
                detail = "12 cases";
                return true;
              });

  h.criterion(5, "gap ratio: worked examples plus 1000 randomized oracle comparisons",
              [](std::string& detail) {
                if (gap_ratio_filter({{"c23", 120}, {"c22", 80}, {"c28", 60}, {"9q5", 4}}, 0.2) !=
                    std::set<std::string>{"c23", "c22", "c28"}) {
                  detail = "worked example 1 failed";
                  return false;
                }
                if (gap_ratio_filter({{"k", 10}}, 0.2) != std::set<std::string>{"k"}) {
                  detail = "singleton example failed";
                  return false;
                }
                if (gap_ratio_filter({{"a", 5}, {"b", 5}, {"c", 5}}, 0.9) !=
                    std::set<std::string>{"a", "b", "c"}) {
                  detail = "uniform example failed";
                  return false;
                }
                SplitMix64 rng(1005);
                for (int i = 0; i < 1000; ++i) {
                  std::map<std::string, std::int64_t> counts;
                  for (int k = 0, n = static_cast<int>(rng.range(1, 8)); k < n; ++k) {
                    counts["k" + std::to_string(k)] = rng.range(1, 1000);
                  }
                  const double tau = 0.05 + rng.uniform() * 0.9;
                  if (gap_ratio_filter(counts, tau) != oracles::oracle_gap_filter(counts, tau)) {
                    detail = "discrepancy at case " + std::to_string(i);
                    return false;
                  }
                }
                detail = "zero discrepancies";
                return true;
              });

  PipelineRun pipe;

  h.criterion(6, "affinity recovers every planted home county, excludes every singleton",
              [&pipe](std::string& detail) {
                const auto entries = load_affinity(pipe.config.paths.affinity);
                std::size_t publishers = 0;
                for (const auto& [pub, info] : pipe.truth.at("publishers").items()) {
                  ++publishers;
                  auto it = entries.find(pub);
                  if (it == entries.end()) {
                    detail = "no entry for " + pub;
                    return false;
                  }
                  if (!it->second.locations.count(info.at("home_county").get<std::string>())) {
                    detail = pub + " lost its home county";
                    return false;
                  }
                  for (const auto& singleton : info.at("singletons")) {
                    if (it->second.locations.count(singleton.get<std::string>())) {
                      detail = pub + " kept singleton " + singleton.get<std::string>();
                      return false;
                    }
                  }
                }
                detail = std::to_string(publishers) + " publishers checked";
                return publishers > 0;
              });

  h.criterion(7, "offline replay: ensemble strictly below the DMA baseline on P50 and P75, < 60 s",
              [&pipe](std::string& detail) {
                const auto& r = pipe.report;
                char buf[200];
                std::snprintf(buf, sizeof(buf),
                              "n=%zu p50 %.1f vs %.1f km, p75 %.1f vs %.1f km, %.1f s",
                              r.treatment.n, r.treatment.p50_km, r.baseline.p50_km,
                              r.treatment.p75_km, r.baseline.p75_km, pipe.eval_seconds);
                detail = buf;
                const std::size_t impressions = pipe.world.impressions.size();
                return impressions >= 2000 && r.treatment.p50_km < r.baseline.p50_km &&
                       r.treatment.p75_km < r.baseline.p75_km && pipe.eval_seconds < 60.0;
              });

  h.criterion(8, "serving: 100 replayed queries byte-identical, stamps contain the user cell, "
                 "backfill exactly below min_k",
              [&pipe](std::string& detail) {
                const auto corpus = load_corpus(pipe.config.paths.corpus);
                const FeedIndex index = build_index(pipe.stamps.stamps, corpus.articles);
                const auto cities = load_cities(pipe.config.paths.cities);
                std::map<std::string, const StampResult*> by_id;
                for (const auto& s : pipe.stamps.stamps) by_id.emplace(s.article_id, &s);

                std::vector<LatLon> users;
                SplitMix64 rng(1008);
                for (int i = 0; i < 100; ++i) {
                  const auto& imp = pipe.world.impressions[static_cast<std::size_t>(
                      rng.range(0, static_cast<std::int64_t>(pipe.world.impressions.size()) - 1))];
                  users.push_back(imp.user_point);
                }
                std::string first_pass;
                for (int pass = 0; pass < 2; ++pass) {
                  std::string serialized;
                  for (const auto& user : users) {
                    const FeedResponse feed = serve(user, 10, index, cities, pipe.config.min_k);
                    serialized += feed_response_to_json(feed) + "\n";
                    const std::size_t supply = index.supply(feed.user_geohash);
                    const bool expect_backfill = supply < pipe.config.min_k;
                    if (expect_backfill !=
                        (feed.source == FeedResponse::SourceKind::Backfill)) {
                      detail = "backfill fired at supply " + std::to_string(supply);
                      return false;
                    }
                    if (feed.source == FeedResponse::SourceKind::Local) {
                      for (const auto& id : feed.articles) {
                        if (!by_id.at(id)->geohashes.count(feed.user_geohash)) {
                          detail = "local article " + id + " missing the user cell";
                          return false;
                        }
                      }
                    }
                  }
                  if (pass == 0) {
                    first_pass = serialized;
                  } else if (first_pass != serialized) {
                    detail = "replay diverged between passes";
                    return false;
                  }
                }
                detail = "100 queries, two passes";
                return true;
              });

  h.criterion(9, "query builder: per-field word cap, order preserved, URL absent",
              [](std::string& detail) {
                SplitMix64 rng(1009);
                for (int i = 0; i < 2000; ++i) {
                  Article a;
                  auto field = [&rng](int max_words, const std::string& tag) {
                    std::string out;
                    const int n = static_cast<int>(rng.range(0, max_words));
                    for (int k = 0; k < n; ++k) {
                      if (!out.empty()) out += ' ';
                      out += tag + std::to_string(k);
                    }
                    return out;
                  };
                  a.title = field(30, "t");
                  a.snippet = field(25, "s");
                  a.body = field(60, "b");
                  a.url = "https://example.test/urltoken" + std::to_string(i);
                  const std::string query = build_geocode_query(a);
                  if (query.find("urltoken") != std::string::npos ||
                      query.find("example.test") != std::string::npos) {
                    detail = "url leaked into the query";
                    return false;
                  }
                  std::map<char, int> per_field;
                  std::map<char, int> last_index{{'t', -1}, {'s', -1}, {'b', -1}};
                  std::istringstream words(query);
                  std::string w;
                  while (words >> w) {
                    const char tag = w[0];
                    ++per_field[tag];
                    const int idx = std::stoi(w.substr(1));
                    if (idx <= last_index[tag]) {
                      detail = "field order not preserved";
                      return false;
                    }
                    last_index[tag] = idx;
                  }
                  for (const auto& [tag, count] : per_field) {
                    if (count > 20) {
                      detail = std::string("field ") + tag + " contributed " +
                               std::to_string(count) + " words";
                      return false;
                    }
                  }
                }
                detail = "2000 randomized articles";
                return true;
              });

  h.criterion(10, "geocoder client: qps ceiling holds per sliding window, cache hits stay local",
              [](std::string& detail) {
                class CountingUpstream : public Geocoder {
                 public:
                  std::vector<GeocodeResult> geocode(const std::string& query) override {
                    std::lock_guard lock(mutex);
                    calls.emplace_back(Clock::now());
                    (void)query;
                    return {};
                  }
                  std::mutex mutex;
                  std::vector<Clock::time_point> calls;
                };
                CountingUpstream upstream;
                GeocoderConfig config;
                config.qps_limit = 25;
                config.cache_capacity = 1000;
                ThrottledCachingGeocoder geocoder(upstream, config);

                std::vector<std::thread> threads;
                for (int t = 0; t < 5; ++t) {
                  threads.emplace_back([&geocoder, t] {
                    for (int i = 0; i < 12; ++i) {
                      geocoder.geocode("q" + std::to_string(t) + "-" + std::to_string(i));
                    }
                  });
                }
                for (auto& t : threads) t.join();

                std::vector<Clock::time_point> times;
                {
                  std::lock_guard lock(upstream.mutex);
                  times = upstream.calls;
                }
                if (times.size() != 60) {
                  detail = "expected 60 upstream calls, saw " + std::to_string(times.size());
                  return false;
                }
                std::sort(times.begin(), times.end());
                for (std::size_t i = 0; i + 25 < times.size(); ++i) {
                  const auto window = times[i + 25] - times[i];
                  if (std::chrono::duration_cast<std::chrono::milliseconds>(window).count() <
                      990) {
                    detail = "26 upstream calls landed inside one second";
                    return false;
                  }
                }

                const std::size_t before = times.size();
                for (int t = 0; t < 5; ++t) {
                  for (int i = 0; i < 12; ++i) {
                    geocoder.geocode("q" + std::to_string(t) + "-" + std::to_string(i));
                  }
                }
                std::size_t after;
                {
                  std::lock_guard lock(upstream.mutex);
                  after = upstream.calls.size();
                }
                if (after != before) {
                  detail = "cache hits reached upstream";
                  return false;
                }
                detail = "60 unique queries throttled at 25 qps; 60 repeats served from cache";
                return true;
              });

  if (h.failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criteria failed\n", h.failures);
  return 1;
}
