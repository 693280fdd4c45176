#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "localnews/gazetteer.hpp"
#include "localnews/geohash.hpp"

namespace localnews {

/// Great-circle distance in kilometers on a sphere of radius kEarthRadiusKm.
double haversine_km(const LatLon& a, const LatLon& b);

/// One (user, article) exposure with the stamping under evaluation.
struct Impression {
  LatLon user_point;
  std::optional<std::vector<std::string>> user_geochain;
  std::string article_id;
  std::set<Geohash> stamped;
  std::optional<std::set<std::string>> article_locations;  // loc_ids
};

/// Distance between the user and the article's stamped area:
/// 0 when the user's length-4 cell is stamped; otherwise 0 when the user
/// geochain and any article location share a city, county or state entry;
/// otherwise the minimum haversine distance to a stamped cell center.
/// Unstamped impressions yield nullopt and are excluded from statistics.
std::optional<double> doc_distance_km(const Impression& imp, const Gazetteer& gaz);

/// Nearest-rank percentile: sorted ascending, 1-based index ceil(p/100*n).
/// p must lie in (0, 100]; empty input is a ValidationError.
double percentile_km(const std::vector<double>& values, double p);

struct DistanceReport {
  std::size_t n = 0;
  double p50_km = 0.0;
  double p75_km = 0.0;
  double zero_fraction = 0.0;
  std::size_t excluded_unstamped = 0;
};

DistanceReport distance_report(const std::vector<Impression>& impressions, const Gazetteer& gaz);

/// Publisher-to-DMA baseline: every mapped publisher's articles are
/// stamped with all geohashes of its DMA.
struct DmaTable {
  std::map<std::string, std::set<Geohash>> dma_geohashes;  // dma_id -> cells
  std::map<std::string, std::string> publisher_dma;        // publisher -> dma_id

  void validate() const;
  /// DMA stamp for a publisher; empty when the publisher is unmapped.
  std::set<Geohash> stamp_for(const std::string& publisher) const;
};

DmaTable load_dma_table(const std::string& path);
void write_dma_table(const std::string& path, const DmaTable& table);

struct EvalReport {
  DistanceReport treatment;
  DistanceReport baseline;
  double delta_p50_km = 0.0;  // treatment - baseline
  double delta_p75_km = 0.0;
};

/// Paired comparison over identical (user, article) pair sets; the arms
/// differ only in their stamps.
EvalReport evaluate(const std::vector<Impression>& treatment,
                    const std::vector<Impression>& baseline, const Gazetteer& gaz);

std::string eval_report_to_json(const EvalReport& report);
std::string eval_report_table(const EvalReport& report);

}  // namespace localnews
