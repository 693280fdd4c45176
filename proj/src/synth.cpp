#include "localnews/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "localnews/serialization.hpp"

namespace localnews {

namespace {

using nlohmann::json;

constexpr double kDegPerKm = 1.0 / kKmPerDegree;

// User placement mix and distances (km).
constexpr double kUserInShare = 0.55;
constexpr double kUserMidShare = 0.30;
constexpr double kMidMinKm = 60, kMidMaxKm = 90;    // 60..150
constexpr double kFarMinKm = 200, kFarMaxKm = 200;  // 200..400
constexpr int kUsersPerArticle = 5;

// Per-publisher article mix. The home cell count (home city + multi +
// county mentions) must dominate every other geohash-3 count by more than
// the gap-ratio threshold, and regional mentions are spread so no single
// outside county collects more than three articles.
constexpr int kHomeCityArticles = 12;
constexpr int kMultiLocationArticles = 2;
constexpr int kHomeCountyArticles = 6;
constexpr int kImplicitArticles = 9;
constexpr int kRegionalArticles = 14;
constexpr int kSingletonArticles = 2;

const char* kNamePrefixes[] = {"Bar",  "Cald", "Dorn", "Els",  "Fenn", "Gris", "Hald", "Jorv",
                               "Kels", "Lorn", "Mers", "Norv", "Osk",  "Pell", "Quin", "Ruth",
                               "Selk", "Torv", "Ulm",  "Vern", "Wex",  "Yarr", "Zell", "Ard",
                               "Bryn", "Corm", "Dray", "Ewan", "Falk", "Garn"};
const char* kNameSuffixes[] = {"ton",  "wick", "ford", "dale", "burg",  "more", "port",
                               "fell", "ham",  "stead", "crest", "mont", "bury", "holm"};
const char* kMastheadWords[] = {"Courier", "Herald",  "Tribune", "Gazette",
                             "Chronicle", "Observer", "Register", "Ledger"};
// Deliberately disjoint from every generated place-name token.
const char* kVocab[] = {"council",  "budget",   "residents", "library",  "bridge",   "weekend",
                        "project",  "officials", "meeting",  "approved", "repairs",  "season",
                        "festival", "volunteers", "schedule", "planning", "review",   "funding",
                        "proposal", "crews",    "students",  "report",   "traffic",  "closure",
                        "annual",   "parade",   "market",    "station",  "garden",   "route",
                        "winter",   "program",  "overnight", "expansion", "hearing",  "ballot"};

template <typename T, std::size_t N>
const T& pick(SplitMix64& rng, const T (&arr)[N]) {
  return arr[static_cast<std::size_t>(rng.range(0, static_cast<std::int64_t>(N) - 1))];
}

struct SynthCity {
  LocationRecord rec;
  std::string alias;  // empty when the city has no secondary alias
  bool bma_only = false;
  std::size_t state_idx = 0;
  std::size_t county_idx = 0;  // index into the state's county list
};

struct SynthCounty {
  LocationRecord rec;
  Geohash gh3{"s"};
  std::vector<std::size_t> cities;  // global city indices
};

struct SynthState {
  std::string name;
  Geohash gh2{"s"};
  LocationRecord rec;
  std::vector<SynthCounty> counties;
};

struct SynthPublisher {
  std::string id;
  std::size_t state_idx = 0;
  std::size_t home_county = 0;
  std::string dma_id;
  bool local = true;
};

struct Builder {
  SplitMix64 rng;
  std::set<std::string> used_names;
  int loc_counter = 0;
  int article_counter = 0;

  explicit Builder(std::uint64_t seed) : rng(seed) {}

  std::string fresh_name() {
    for (;;) {
      std::string name = std::string(pick(rng, kNamePrefixes)) + pick(rng, kNameSuffixes);
      if (used_names.insert(name).second) return name;
    }
  }

  std::string next_loc_id() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "loc-%04d", ++loc_counter);
    return buf;
  }

  std::string next_article_id() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "art-%05d", ++article_counter);
    return buf;
  }

  std::string words(int count) {
    std::string out;
    for (int i = 0; i < count; ++i) {
      if (!out.empty()) out += ' ';
      out += pick(rng, kVocab);
    }
    return out;
  }
};

BoundingBox inset(const BoundingBox& box, double fraction) {
  const double dy = (box.north - box.south) * fraction;
  const double dx = (box.east - box.west) * fraction;
  return BoundingBox(box.south + dy, box.west + dx, box.north - dy, box.east - dx);
}

// Geohash of the child cell at (row, col) inside a parent cell, one
// character deeper. Rows count south to north, columns west to east.
// The 32 children tile 8x4 under an even-length parent and 4x8 under an
// odd-length one.
Geohash child_cell(const Geohash& parent, int row, int col) {
  const BoundingBox box = decode_bbox(parent);
  const int len = parent.length() + 1;
  const double dlat = cell_height_deg(len);
  const double dlon = cell_width_deg(len);
  const int rows = static_cast<int>(std::lround((box.north - box.south) / dlat));
  const int cols = static_cast<int>(std::lround((box.east - box.west) / dlon));
  if (row < 0 || row >= rows || col < 0 || col >= cols) {
    throw ValidationError("child cell (" + std::to_string(row) + ", " + std::to_string(col) +
                          ") outside the " + std::to_string(rows) + "x" + std::to_string(cols) +
                          " grid of " + parent.text());
  }
  const LatLon center(box.south + (row + 0.5) * dlat, box.west + (col + 0.5) * dlon);
  return encode(center, len);
}

LatLon uniform_in_bbox(SplitMix64& rng, const BoundingBox& box) {
  return LatLon(box.south + rng.uniform() * (box.north - box.south),
                box.west + rng.uniform() * (box.east - box.west));
}

LatLon offset_km(const LatLon& origin, double km, double bearing_rad) {
  double lat = origin.lat + km * std::cos(bearing_rad) * kDegPerKm;
  double lon = origin.lon +
               km * std::sin(bearing_rad) * kDegPerKm / std::cos(origin.lat * 3.14159265358979 / 180.0);
  lat = std::clamp(lat, -89.9, 89.9);
  lon = std::clamp(lon, -179.9, 179.9);
  return LatLon(lat, lon);
}

std::string slug(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == ' ') {
      out += '-';
    } else if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>(c - 'A' + 'a');
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() {
  return static_cast<double>(next() >> 11) * (1.0 / 9007199254740992.0);
}

std::int64_t SplitMix64::range(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ValidationError("SplitMix64::range with hi < lo");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next() % span);
}

SynthWorld generate_world(std::uint64_t seed) {
  Builder b(seed);
  SynthWorld world;
  json truth;
  truth["seed"] = seed;

  const std::string country = "Veronia";
  const char* state_cells[] = {"c2", "9x", "dn"};

  // DMA pairs are adjacent columns; distinct DMAs sit at least two cells
  // apart so mid-range users of one DMA cannot drift into another.
  const std::pair<int, int> county_grid[8] = {{0, 0}, {0, 1}, {0, 4}, {0, 5},
                                              {3, 1}, {3, 2}, {3, 5}, {3, 6}};

  std::vector<SynthState> states;
  std::vector<SynthCity> cities;

  for (std::size_t s = 0; s < 3; ++s) {
    SynthState state;
    state.gh2 = Geohash(state_cells[s]);
    state.name = b.fresh_name() + " State";
    state.rec.loc_id = b.next_loc_id();
    state.rec.name = state.name;
    state.rec.level = AdminLevel::State;
    state.rec.geochain = {state.name, country};
    state.rec.bbox = inset(decode_bbox(state.gh2), 0.01);
    state.rec.point = state.rec.bbox.center();
    state.rec.aliases = {state.name};

    for (const auto& [row, col] : county_grid) {
      SynthCounty county;
      county.gh3 = child_cell(state.gh2, row, col);
      const std::string base = b.fresh_name();
      county.rec.loc_id = b.next_loc_id();
      county.rec.name = base + " County";
      county.rec.level = AdminLevel::CountyOrDistrict;
      county.rec.geochain = {county.rec.name, state.name, country};
      county.rec.bbox = inset(decode_bbox(county.gh3), 0.02);
      county.rec.point = county.rec.bbox.center();
      county.rec.aliases = {county.rec.name};

      // Two regular cities per county; the first doubles as the county
      // seat (its name seeds the county name). Positions fit the 4-wide,
      // 8-tall child grid of a length-3 cell.
      const std::pair<int, int> city_grid[2] = {{1, 1}, {5, 2}};
      for (int c = 0; c < 2; ++c) {
        SynthCity city;
        const Geohash cell = child_cell(county.gh3, city_grid[c].first, city_grid[c].second);
        city.rec.loc_id = b.next_loc_id();
        city.rec.name = c == 0 ? base : b.fresh_name();
        city.rec.level = AdminLevel::City;
        city.rec.geochain = {city.rec.name, county.rec.name, state.name, country};
        city.rec.bbox = inset(decode_bbox(cell), 0.15);
        city.rec.point = city.rec.bbox.center();
        city.rec.aliases = {city.rec.name};
        if (b.rng.uniform() < 0.4) {
          city.alias = "Old " + city.rec.name;
          city.rec.aliases.push_back(city.alias);
        }
        city.state_idx = s;
        city.county_idx = state.counties.size();
        county.cities.push_back(cities.size());
        cities.push_back(std::move(city));
      }

      // One geocoder-only city per county pair, invisible to the LT scan.
      if (state.counties.size() % 2 == 0) {
        SynthCity hidden;
        const Geohash cell = child_cell(county.gh3, 2, 1);
        hidden.rec.loc_id = b.next_loc_id();
        hidden.rec.name = b.fresh_name();
        hidden.rec.level = AdminLevel::City;
        hidden.rec.geochain = {hidden.rec.name, county.rec.name, state.name, country};
        hidden.rec.bbox = inset(decode_bbox(cell), 0.15);
        hidden.rec.point = hidden.rec.bbox.center();
        hidden.alias = "Old " + hidden.rec.name;
        hidden.rec.aliases = {hidden.rec.name, hidden.alias};
        hidden.bma_only = true;
        hidden.state_idx = s;
        hidden.county_idx = state.counties.size();
        county.cities.push_back(cities.size());
        cities.push_back(std::move(hidden));
      }

      state.counties.push_back(std::move(county));
    }
    states.push_back(std::move(state));
  }

  for (const auto& state : states) {
    world.lt_records.push_back(state.rec);
    for (const auto& county : state.counties) world.lt_records.push_back(county.rec);
  }
  for (const auto& city : cities) {
    if (city.bma_only) {
      world.bma_only_records.push_back(city.rec);
    } else {
      world.lt_records.push_back(city.rec);
    }
  }

  // Publishers: one per DMA (county pairs 0+1, 2+3, 4+5, 6+7), seated in
  // the pair's first county.
  std::vector<SynthPublisher> publishers;
  json truth_publishers = json::object();
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (std::size_t d = 0; d < 4; ++d) {
      const std::size_t home = d * 2;
      SynthPublisher pub;
      pub.state_idx = s;
      pub.home_county = home;
      const auto& seat = cities[states[s].counties[home].cities[0]];
      pub.id = slug(seat.rec.name + " " + pick(b.rng, kMastheadWords));
      pub.dma_id = "dma-" + slug(states[s].name) + "-" + std::to_string(d + 1);
      publishers.push_back(pub);

      auto& dma_cells = world.dma.dma_geohashes[pub.dma_id];
      for (std::size_t c : {home, home + 1}) {
        const auto cover_cells = cover(states[s].counties[c].rec.bbox, 4);
        dma_cells.insert(cover_cells.begin(), cover_cells.end());
      }
      world.dma.publisher_dma[pub.id] = pub.dma_id;
      world.local_publishers.push_back(pub.id);

      world.cities.emplace_back(seat.rec.name, seat.rec.point);
    }
  }

  const std::int64_t base_ts = parse_iso8601_utc("2024-03-01T00:00:00Z");
  json truth_articles = json::object();

  auto push_article = [&](const std::string& publisher, const std::string& title,
                          const std::string& body, const std::string& snippet,
                          const std::string& archetype, const std::vector<std::string>& true_locs,
                          const BoundingBox* true_area) {
    Article a;
    a.id = b.next_article_id();
    a.title = title;
    a.snippet = snippet;
    a.body = body;
    a.publisher = publisher;
    a.url = "https://example-news.test/articles/" + a.id;
    a.published_at = base_ts + b.rng.range(0, 29) * 86400 + b.rng.range(0, 86399);
    truth_articles[a.id] = {{"archetype", archetype},
                            {"publisher", publisher},
                            {"true_locations", true_locs}};

    // Impressions: users in, near and far from the article's true area.
    if (true_area != nullptr) {
      const LatLon center = true_area->center();
      for (int u = 0; u < kUsersPerArticle; ++u) {
        Impression imp;
        imp.article_id = a.id;
        const double roll = b.rng.uniform();
        if (roll < kUserInShare) {
          imp.user_point = uniform_in_bbox(b.rng, *true_area);
          if (!true_locs.empty()) {
            // Chain of the first true location, when we track it.
            for (const auto& rec : world.lt_records) {
              if (rec.loc_id == true_locs.front()) {
                imp.user_geochain = rec.geochain;
                break;
              }
            }
          }
        } else if (roll < kUserInShare + kUserMidShare) {
          const double km = kMidMinKm + b.rng.uniform() * kMidMaxKm;
          imp.user_point = offset_km(center, km, b.rng.uniform() * 6.283185307179586);
        } else {
          const double km = kFarMinKm + b.rng.uniform() * kFarMaxKm;
          imp.user_point = offset_km(center, km, b.rng.uniform() * 6.283185307179586);
        }
        world.impressions.push_back(std::move(imp));
      }
    }
    world.articles.push_back(std::move(a));
  };

  auto mention = [&](const SynthCity& city) {
    if (!city.alias.empty() && b.rng.uniform() < 0.5) return city.alias;
    return city.rec.name;
  };

  for (const auto& pub : publishers) {
    const auto& state = states[pub.state_idx];
    const auto& home = state.counties[pub.home_county];
    const auto home_city_indices = home.cities;

    truth_publishers[pub.id] = {{"home_county", home.rec.loc_id},
                                {"home_gh3", home.gh3.text()},
                                {"dma", pub.dma_id},
                                {"state", state.name}};
    json singles = json::array();

    for (int i = 0; i < kHomeCityArticles; ++i) {
      // Skip geocoder-only cities for LT-driven home coverage.
      const SynthCity* city = nullptr;
      do {
        city = &cities[home_city_indices[static_cast<std::size_t>(
            b.rng.range(0, static_cast<std::int64_t>(home_city_indices.size()) - 1))]];
      } while (city->bma_only);
      const std::string m = mention(*city);
      std::string title, body;
      if (i % 4 == 3) {
        // Long body with a mid-text mention: visible to LT, trimmed out
        // of the geocoder query.
        title = b.words(5);
        body = b.words(14) + " " + m + " " + b.words(14);
      } else {
        title = "Crews begin " + b.words(1) + " repairs in " + m;
        body = b.words(static_cast<int>(b.rng.range(10, 18)));
      }
      const std::string snippet = b.rng.uniform() < 0.3 ? b.words(6) : "";
      push_article(pub.id, title, body, snippet, "home_city", {city->rec.loc_id},
                   &city->rec.bbox);
    }

    for (int i = 0; i < kMultiLocationArticles; ++i) {
      const auto& a = cities[home_city_indices[0]];
      const auto& c = cities[home_city_indices[1]];
      const std::string title = a.rec.name + " and " + c.rec.name + " to share " + b.words(1) +
                                " funding";
      push_article(pub.id, title, b.words(12), "", "multi_location",
                   {a.rec.loc_id, c.rec.loc_id}, &a.rec.bbox);
    }

    for (int i = 0; i < kHomeCountyArticles; ++i) {
      const std::string title = home.rec.name + " weighs " + b.words(1) + " ballot measure";
      push_article(pub.id, title, b.words(static_cast<int>(b.rng.range(8, 16))), "",
                   "home_county", {home.rec.loc_id}, &home.rec.bbox);
    }

    for (int i = 0; i < kImplicitArticles; ++i) {
      push_article(pub.id, "Officials outline " + b.words(1) + " schedule",
                   b.words(static_cast<int>(b.rng.range(10, 20))), "", "implicit",
                   {home.rec.loc_id}, &home.rec.bbox);
    }

    // Same-state coverage outside the publisher's DMA, at most three
    // articles per county so the home cell count dominates the gap filter.
    std::vector<std::size_t> targets;
    for (std::size_t c = 0; c < state.counties.size(); ++c) {
      if (c != pub.home_county && c != pub.home_county + 1) targets.push_back(c);
    }
    for (int i = 0; i < kRegionalArticles; ++i) {
      const auto& county = state.counties[targets[static_cast<std::size_t>(i) % targets.size()]];
      const SynthCity* city = nullptr;
      do {
        city = &cities[county.cities[static_cast<std::size_t>(
            b.rng.range(0, static_cast<std::int64_t>(county.cities.size()) - 1))]];
      } while (city->bma_only);
      const std::string title = "New " + b.words(1) + " program opens in " + mention(*city);
      push_article(pub.id, title, b.words(static_cast<int>(b.rng.range(10, 18))), "", "regional",
                   {city->rec.loc_id}, &city->rec.bbox);
    }

    for (int i = 0; i < kSingletonArticles; ++i) {
      const SynthCity* city = nullptr;
      do {
        city = &cities[static_cast<std::size_t>(
            b.rng.range(0, static_cast<std::int64_t>(cities.size()) - 1))];
      } while (city->bma_only || city->state_idx == pub.state_idx);
      const std::string title = "Visiting " + b.words(1) + " crews assist in " + city->rec.name;
      push_article(pub.id, title, b.words(12), "", "singleton", {city->rec.loc_id},
                   &city->rec.bbox);
      singles.push_back(city->rec.loc_id);
    }
    truth_publishers[pub.id]["singletons"] = singles;
  }

  // Wire publishers: no affinity entry and no DMA mapping. Their articles
  // drive rules 4, 5 and 6.
  const char* wire_ids[] = {"national-newswire", "continental-press"};
  std::vector<const SynthCity*> hidden_cities;
  for (const auto& city : cities) {
    if (city.bma_only) hidden_cities.push_back(&city);
  }
  std::size_t hidden_cursor = 0;
  for (const char* wire : wire_ids) {
    for (int i = 0; i < 2; ++i) {  // rule 4: LT and geocoder agree
      const SynthCity* city = nullptr;
      do {
        city = &cities[static_cast<std::size_t>(
            b.rng.range(0, static_cast<std::int64_t>(cities.size()) - 1))];
      } while (city->bma_only);
      const std::string title = "Regulators review " + b.words(1) + " plans in " + city->rec.name;
      push_article(wire, title, b.words(12), "", "wire_corroborated", {city->rec.loc_id},
                   &city->rec.bbox);
    }
    for (int i = 0; i < 2; ++i) {  // rule 5: geocoder-only, canonical name
      const SynthCity* city = hidden_cities[hidden_cursor++ % hidden_cities.size()];
      const std::string title = "Storm damage reported across " + city->rec.name;
      push_article(wire, title, b.words(10), "", "wire_bma_high", {city->rec.loc_id},
                   &city->rec.bbox);
    }
    {  // geocoder-only alias mention: Medium confidence, stamps nothing
      const SynthCity* city = hidden_cities[hidden_cursor++ % hidden_cities.size()];
      const std::string title = "Markets steady after " + b.words(1) + " report from " +
                                city->alias;
      push_article(wire, title, b.words(10), "", "wire_bma_medium", {city->rec.loc_id},
                   &city->rec.bbox);
    }
    {  // no location at all
      push_article(wire, "Analysts expect " + b.words(1) + " season", b.words(14), "",
                   "wire_no_location", {},
                   &states[0].counties[0].rec.bbox);
    }
  }

  truth["publishers"] = truth_publishers;
  truth["articles"] = truth_articles;
  truth["local_publishers"] = world.local_publishers;
  truth["country"] = country;
  world.truth_json = truth.dump(2);
  return world;
}

void write_world(const SynthWorld& world, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  write_gazetteer((dir / "gazetteer.tsv").string(), world.lt_records);

  std::vector<LocationRecord> bma_records = world.lt_records;
  bma_records.insert(bma_records.end(), world.bma_only_records.begin(),
                     world.bma_only_records.end());
  write_gazetteer((dir / "bma_gazetteer.tsv").string(), bma_records);

  {
    std::ofstream out(dir / "corpus.jsonl");
    if (!out) throw IoError("cannot write corpus file");
    for (const auto& a : world.articles) out << article_to_json(a) << '\n';
  }
  write_impressions((dir / "impressions.jsonl").string(), world.impressions);
  write_dma_table((dir / "dma.json").string(), world.dma);
  write_cities((dir / "cities.tsv").string(), world.cities);

  {
    std::ofstream out(dir / "publishers.txt");
    if (!out) throw IoError("cannot write publishers file");
    for (const auto& p : world.local_publishers) out << p << '\n';
  }
  {
    std::ofstream out(dir / "truth.json");
    if (!out) throw IoError("cannot write truth file");
    out << world.truth_json << '\n';
  }
  {
    // Ready-to-use config with paths relative to the output directory.
    // The geocoder backing is offline, so the QPS guard is irrelevant
    // here; a tight default would only slow the replay down.
    json cfg;
    cfg["qps_limit"] = 100000;
    cfg["paths"] = {{"gazetteer", "gazetteer.tsv"},   {"bma_gazetteer", "bma_gazetteer.tsv"},
                    {"cities", "cities.tsv"},          {"affinity", "affinity.jsonl"},
                    {"corpus", "corpus.jsonl"},        {"dma", "dma.json"},
                    {"stamps", "stamps.jsonl"},        {"impressions", "impressions.jsonl"}};
    std::ofstream out(dir / "config.json");
    if (!out) throw IoError("cannot write config file");
    out << cfg.dump(2) << '\n';
  }
}

}  // namespace localnews
