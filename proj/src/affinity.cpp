#include "localnews/affinity.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace localnews {

namespace {

using nlohmann::json;

// One detected location within a publisher's corpus. Geocoder results that
// resolve to a gazetteer record share the key (and admin chain) of the LT
// detection; unresolved ones participate in cell counting but cannot join
// the final entry, which is keyed by loc_id.
struct Detected {
  std::optional<std::string> loc_id;
  std::optional<std::string> county;
  std::optional<std::string> state;
  std::set<Geohash> cells;
};

}  // namespace

void AffinityParams::validate() const {
  if (!(tau_geohash3 > 0 && tau_geohash3 < 1)) {
    throw ValidationError("tau_geohash3 must lie in (0, 1)");
  }
  if (!(tau_admin > 0 && tau_admin < 1)) {
    throw ValidationError("tau_admin must lie in (0, 1)");
  }
  if (min_articles < 1) throw ValidationError("min_articles must be >= 1");
  if (time_window_s <= 0) throw ValidationError("time window must be positive");
}

std::set<std::string> gap_ratio_filter(const std::map<std::string, std::int64_t>& counts,
                                       double tau) {
  if (counts.empty()) {
    throw ValidationError("gap_ratio_filter requires a non-empty count map");
  }
  if (!(tau > 0 && tau < 1)) {
    throw ValidationError("gap ratio tau must lie in (0, 1)");
  }
  std::vector<std::pair<std::string, std::int64_t>> order(counts.begin(), counts.end());
  for (const auto& [key, count] : order) {
    if (count <= 0) {
      throw ValidationError("gap_ratio_filter count for \"" + key + "\" must be positive");
    }
  }
  std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::size_t kept = order.size();
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const double ratio = static_cast<double>(order[i + 1].second) /
                         static_cast<double>(order[i].second);
    if (ratio < tau) {
      kept = i + 1;
      break;
    }
  }
  std::set<std::string> result;
  for (std::size_t i = 0; i < kept; ++i) result.insert(order[i].first);
  return result;
}

std::optional<AffinityEntry> build_affinity(const std::string& publisher,
                                            const std::vector<Article>& articles,
                                            const Gazetteer& gaz, Geocoder& geocoder,
                                            const AffinityParams& params) {
  params.validate();
  for (const auto& a : articles) {
    if (a.publisher != publisher) {
      throw ValidationError("article " + a.id + " belongs to publisher \"" + a.publisher +
                            "\", not \"" + publisher + "\"");
    }
  }
  if (articles.empty()) return std::nullopt;

  // Time range: the window ending at the newest article.
  std::int64_t newest = articles.front().published_at;
  for (const auto& a : articles) newest = std::max(newest, a.published_at);
  std::vector<const Article*> windowed;
  for (const auto& a : articles) {
    if (a.published_at >= newest - params.time_window_s) windowed.push_back(&a);
  }
  if (static_cast<int>(windowed.size()) < params.min_articles) return std::nullopt;

  std::map<std::string, Detected> detections;            // key -> location info
  std::vector<std::set<std::string>> article_keys;       // per-article detected keys
  std::size_t failures = 0;

  for (const Article* article : windowed) {
    try {
      std::map<std::string, Detected> in_article;

      for (const LocationRecord* rec : lt_lookup(article_full_text(*article), gaz)) {
        try {
          Detected d;
          d.loc_id = rec->loc_id;
          d.county = rec->county();
          d.state = rec->state();
          d.cells = location_geohashes(*rec, params.geohash_len, params.max_cover_cells);
          in_article.emplace(rec->loc_id, std::move(d));
        } catch (const CoverageTooLargeError&) {
          // Oversized covers (country-scale records) drop out of affinity.
        }
      }

      const std::string query = build_geocode_query(*article);
      if (!query.empty()) {
        for (const auto& r : geocoder.geocode(query)) {
          if (r.confidence < Confidence::Medium) continue;
          std::string key =
              r.source_loc_id ? *r.source_loc_id : "bma::" + normalize_alias(r.matched_name);
          if (in_article.count(key)) continue;
          try {
            Detected d;
            if (r.source_loc_id) {
              d.loc_id = r.source_loc_id;
              if (const LocationRecord* rec = gaz.by_loc_id(*r.source_loc_id)) {
                d.county = rec->county();
                d.state = rec->state();
              }
            }
            d.cells = cover(r.bbox, params.geohash_len, params.max_cover_cells);
            in_article.emplace(std::move(key), std::move(d));
          } catch (const CoverageTooLargeError&) {
          }
        }
      }

      std::set<std::string> keys;
      for (auto& [key, det] : in_article) {
        keys.insert(key);
        detections.emplace(key, det);  // first sighting wins; info is identical
      }
      article_keys.push_back(std::move(keys));
    } catch (const Error&) {
      ++failures;
      article_keys.emplace_back();
    }
  }
  if (failures * 2 > windowed.size()) {
    throw AffinityBuildError("publisher \"" + publisher + "\": " + std::to_string(failures) +
                             " of " + std::to_string(windowed.size()) + " articles failed");
  }

  // Article-level counts per geohash-3 prefix.
  std::map<std::string, std::int64_t> prefix_counts;
  for (const auto& keys : article_keys) {
    std::set<std::string> prefixes;
    for (const auto& key : keys) {
      for (const auto& cell : detections[key].cells) {
        prefixes.insert(cell.prefix(3).text());
      }
    }
    for (const auto& p : prefixes) ++prefix_counts[p];
  }
  if (prefix_counts.empty()) return std::nullopt;
  const std::set<std::string> kept_prefixes = gap_ratio_filter(prefix_counts, params.tau_geohash3);

  // A location survives when at least one of its length-4 cells kept its
  // geohash-3 prefix.
  std::set<std::string> surviving;
  for (const auto& [key, det] : detections) {
    for (const auto& cell : det.cells) {
      if (kept_prefixes.count(cell.prefix(3).text())) {
        surviving.insert(key);
        break;
      }
    }
  }

  // County and state passes over the survivors, article-counted like the
  // prefixes.
  std::map<std::string, std::int64_t> county_counts;
  std::map<std::string, std::int64_t> state_counts;
  for (const auto& keys : article_keys) {
    std::set<std::string> counties;
    std::set<std::string> states;
    for (const auto& key : keys) {
      if (!surviving.count(key)) continue;
      const auto& det = detections[key];
      if (det.county) counties.insert(*det.county);
      if (det.state) states.insert(*det.state);
    }
    for (const auto& c : counties) ++county_counts[c];
    for (const auto& s : states) ++state_counts[s];
  }
  std::optional<std::set<std::string>> kept_counties;
  if (!county_counts.empty()) kept_counties = gap_ratio_filter(county_counts, params.tau_admin);
  std::optional<std::set<std::string>> kept_states;
  if (!state_counts.empty()) kept_states = gap_ratio_filter(state_counts, params.tau_admin);

  AffinityEntry entry;
  entry.publisher = publisher;
  for (const auto& key : surviving) {
    const auto& det = detections[key];
    if (!det.loc_id) continue;  // unresolved geocoder hit, cannot be listed
    if (det.county && kept_counties && !kept_counties->count(*det.county)) continue;
    if (det.state && kept_states && !kept_states->count(*det.state)) continue;
    entry.locations.insert(*det.loc_id);
    entry.geohashes.insert(det.cells.begin(), det.cells.end());
  }
  if (entry.locations.empty()) return std::nullopt;

  for (std::size_t i = 0; i < article_keys.size(); ++i) {
    for (const auto& key : article_keys[i]) {
      const auto& det = detections[key];
      if (det.loc_id && entry.locations.count(*det.loc_id)) ++entry.support[*det.loc_id];
    }
  }
  return entry;
}

std::string affinity_to_json(const AffinityEntry& entry) {
  json obj;
  obj["publisher"] = entry.publisher;
  obj["locations"] = entry.locations;
  json cells = json::array();
  for (const auto& gh : entry.geohashes) cells.push_back(gh.text());
  obj["geohashes"] = cells;
  obj["support"] = entry.support;
  return obj.dump();
}

AffinityEntry affinity_from_json(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad affinity JSON: ") + e.what());
  }
  AffinityEntry entry;
  try {
    entry.publisher = obj.at("publisher").get<std::string>();
    for (const auto& l : obj.at("locations")) entry.locations.insert(l.get<std::string>());
    for (const auto& g : obj.at("geohashes")) entry.geohashes.insert(Geohash(g.get<std::string>()));
    if (obj.contains("support")) {
      for (const auto& [k, v] : obj.at("support").items()) {
        entry.support[k] = v.get<std::int64_t>();
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad affinity record: ") + e.what());
  }
  if (entry.publisher.empty()) throw ValidationError("affinity entry without publisher");
  return entry;
}

std::map<std::string, AffinityEntry> load_affinity(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open affinity file " + path);
  std::map<std::string, AffinityEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      AffinityEntry entry = affinity_from_json(line);
      entries[entry.publisher] = std::move(entry);
    } catch (const ValidationError& e) {
      throw ValidationError("affinity line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return entries;
}

void write_affinity(const std::string& path, const std::vector<AffinityEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write affinity file " + path);
  for (const auto& entry : entries) out << affinity_to_json(entry) << '\n';
}

}  // namespace localnews
