#include "localnews/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace localnews {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double deg) { return deg * kPi / 180.0; }

// Geochain entries are aligned by distance from the country end: city is
// 4 entries from the end, county 3, state 2.
std::optional<std::string> chain_entry(const std::vector<std::string>& chain, int from_end) {
  if (static_cast<int>(chain.size()) < from_end) return std::nullopt;
  return chain[chain.size() - static_cast<std::size_t>(from_end)];
}

bool division_match(const std::vector<std::string>& user_chain,
                    const std::vector<std::string>& loc_chain) {
  for (int from_end : {4, 3, 2}) {  // city, county, state; country alone never zeroes
    const auto u = chain_entry(user_chain, from_end);
    const auto l = chain_entry(loc_chain, from_end);
    if (u && l && *u == *l) return true;
  }
  return false;
}

}  // namespace

double haversine_km(const LatLon& a, const LatLon& b) {
  const double lat1 = deg2rad(a.lat);
  const double lat2 = deg2rad(b.lat);
  const double dlat = deg2rad(b.lat - a.lat);
  const double dlon = deg2rad(b.lon - a.lon);
  const double h = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1) * std::cos(lat2) * std::sin(dlon / 2) * std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

std::optional<double> doc_distance_km(const Impression& imp, const Gazetteer& gaz) {
  if (imp.stamped.empty()) return std::nullopt;

  const Geohash user_cell = encode(imp.user_point, 4);
  if (imp.stamped.count(user_cell)) return 0.0;

  if (imp.user_geochain && imp.article_locations) {
    for (const auto& loc_id : *imp.article_locations) {
      const LocationRecord* rec = gaz.by_loc_id(loc_id);
      if (rec && division_match(*imp.user_geochain, rec->geochain)) return 0.0;
    }
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto& gh : imp.stamped) {
    best = std::min(best, haversine_km(imp.user_point, decode_bbox(gh).center()));
  }
  return best;
}

double percentile_km(const std::vector<double>& values, double p) {
  if (values.empty()) throw ValidationError("percentile of empty value list");
  if (!(p > 0 && p <= 100)) throw ValidationError("percentile p must lie in (0, 100]");
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

DistanceReport distance_report(const std::vector<Impression>& impressions, const Gazetteer& gaz) {
  DistanceReport report;
  std::vector<double> distances;
  std::size_t zeros = 0;
  for (const auto& imp : impressions) {
    const auto d = doc_distance_km(imp, gaz);
    if (!d) {
      ++report.excluded_unstamped;
      continue;
    }
    distances.push_back(*d);
    if (*d == 0.0) ++zeros;
  }
  report.n = distances.size();
  if (!distances.empty()) {
    report.p50_km = percentile_km(distances, 50);
    report.p75_km = percentile_km(distances, 75);
    report.zero_fraction = static_cast<double>(zeros) / static_cast<double>(distances.size());
  }
  return report;
}

void DmaTable::validate() const {
  for (const auto& [publisher, dma_id] : publisher_dma) {
    if (!dma_geohashes.count(dma_id)) {
      throw ValidationError("publisher \"" + publisher + "\" maps to unknown DMA \"" + dma_id +
                            "\"");
    }
  }
}

std::set<Geohash> DmaTable::stamp_for(const std::string& publisher) const {
  auto it = publisher_dma.find(publisher);
  if (it == publisher_dma.end()) return {};
  return dma_geohashes.at(it->second);
}

DmaTable load_dma_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open DMA table " + path);
  json obj;
  try {
    in >> obj;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad DMA table JSON: ") + e.what());
  }
  DmaTable table;
  try {
    for (const auto& [dma_id, cells] : obj.at("dmas").items()) {
      auto& set = table.dma_geohashes[dma_id];
      for (const auto& gh : cells) set.insert(Geohash(gh.get<std::string>()));
    }
    for (const auto& [publisher, dma_id] : obj.at("publishers").items()) {
      table.publisher_dma[publisher] = dma_id.get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad DMA table: ") + e.what());
  }
  table.validate();
  return table;
}

void write_dma_table(const std::string& path, const DmaTable& table) {
  json dmas = json::object();
  for (const auto& [dma_id, cells] : table.dma_geohashes) {
    json list = json::array();
    for (const auto& gh : cells) list.push_back(gh.text());
    dmas[dma_id] = std::move(list);
  }
  json obj;
  obj["dmas"] = std::move(dmas);
  obj["publishers"] = table.publisher_dma;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write DMA table " + path);
  out << obj.dump(2) << '\n';
}

EvalReport evaluate(const std::vector<Impression>& treatment,
                    const std::vector<Impression>& baseline, const Gazetteer& gaz) {
  auto pair_key = [](const Impression& imp) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f", imp.user_point.lat, imp.user_point.lon);
    return imp.article_id + "@" + buf;
  };
  std::vector<std::string> lhs, rhs;
  lhs.reserve(treatment.size());
  rhs.reserve(baseline.size());
  for (const auto& imp : treatment) lhs.push_back(pair_key(imp));
  for (const auto& imp : baseline) rhs.push_back(pair_key(imp));
  std::sort(lhs.begin(), lhs.end());
  std::sort(rhs.begin(), rhs.end());
  if (lhs != rhs) {
    throw ValidationError("treatment and baseline impressions cover different (user, article) pairs");
  }

  EvalReport report;
  report.treatment = distance_report(treatment, gaz);
  report.baseline = distance_report(baseline, gaz);
  report.delta_p50_km = report.treatment.p50_km - report.baseline.p50_km;
  report.delta_p75_km = report.treatment.p75_km - report.baseline.p75_km;
  return report;
}

std::string eval_report_to_json(const EvalReport& report) {
  auto arm = [](const DistanceReport& r) {
    json obj;
    obj["n"] = r.n;
    obj["p50_km"] = r.p50_km;
    obj["p75_km"] = r.p75_km;
    obj["zero_fraction"] = r.zero_fraction;
    obj["excluded_unstamped"] = r.excluded_unstamped;
    return obj;
  };
  json obj;
  obj["treatment"] = arm(report.treatment);
  obj["baseline"] = arm(report.baseline);
  obj["delta"] = {{"p50_km", report.delta_p50_km}, {"p75_km", report.delta_p75_km}};
  return obj.dump();
}

std::string eval_report_table(const EvalReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-10s %8s %10s %10s %7s %10s\n", "arm", "n", "p50_km",
                "p75_km", "zero%", "excluded");
  out << line;
  auto row = [&](const char* name, const DistanceReport& r) {
    std::snprintf(line, sizeof(line), "%-10s %8zu %10.2f %10.2f %6.1f%% %10zu\n", name, r.n,
                  r.p50_km, r.p75_km, 100.0 * r.zero_fraction, r.excluded_unstamped);
    out << line;
  };
  row("treatment", report.treatment);
  row("baseline", report.baseline);
  std::snprintf(line, sizeof(line), "%-10s %8s %+10.2f %+10.2f\n", "delta", "", report.delta_p50_km,
                report.delta_p75_km);
  out << line;
  return out.str();
}

}  // namespace localnews
