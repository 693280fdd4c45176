#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "localnews/corpus.hpp"
#include "localnews/gazetteer.hpp"
#include "localnews/geocoder.hpp"

namespace localnews {

/// High-affinity coverage of one publisher.
struct AffinityEntry {
  std::string publisher;
  std::set<std::string> locations;          // surviving loc_ids
  std::set<Geohash> geohashes;              // length-4 cover of those locations
  std::map<std::string, std::int64_t> support;  // loc_id -> article count
};

struct AffinityParams {
  double tau_geohash3 = 0.2;
  double tau_admin = 0.2;
  int min_articles = 20;
  std::int64_t time_window_s = 30LL * 86400;
  int geohash_len = 4;
  std::size_t max_cover_cells = 4096;

  void validate() const;
};

/// Frequency-gap outlier cut. Counts are sorted descending (ties by key
/// ascending); the kept set is the head up to the first consecutive pair
/// whose ratio drops below tau. No such drop keeps everything.
std::set<std::string> gap_ratio_filter(const std::map<std::string, std::int64_t>& counts,
                                       double tau);

/// Builds the publisher's affinity entry from its articles:
/// detect LT + geocoder locations per article, count article-level
/// geohash-3 prefixes and gap-filter them, keep locations with a surviving
/// length-4 cell, gap-filter the survivors' counties and states, then emit
/// the remaining locations and the union of their covers. Returns nullopt
/// when fewer than min_articles articles fall in the time window
/// (measured back from the newest article).
std::optional<AffinityEntry> build_affinity(const std::string& publisher,
                                            const std::vector<Article>& articles,
                                            const Gazetteer& gaz, Geocoder& geocoder,
                                            const AffinityParams& params);

/// Affinity file line (JSON object, no trailing newline).
std::string affinity_to_json(const AffinityEntry& entry);
AffinityEntry affinity_from_json(const std::string& line);

/// publisher -> entry map from a line-delimited affinity file.
std::map<std::string, AffinityEntry> load_affinity(const std::string& path);
void write_affinity(const std::string& path, const std::vector<AffinityEntry>& entries);

}  // namespace localnews
