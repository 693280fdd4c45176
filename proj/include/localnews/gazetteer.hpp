#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "localnews/geohash.hpp"

namespace localnews {

enum class AdminLevel { City, CountyOrDistrict, State, Country };

std::string to_string(AdminLevel level);
AdminLevel admin_level_from_string(const std::string& text);

/// Expected geochain length for a level: city 4, county 3, state 2, country 1.
int geochain_length(AdminLevel level);

/// One curated location: canonical name, aliases, admin geochain ordered
/// from the location's own level up to the country, bounding box and a
/// representative point.
struct LocationRecord {
  std::string loc_id;
  std::string name;
  std::vector<std::string> aliases;
  AdminLevel level = AdminLevel::City;
  std::vector<std::string> geochain;
  BoundingBox bbox;
  LatLon point;

  /// County name, when the geochain carries one (city and county levels).
  std::optional<std::string> county() const;
  /// State name, when the geochain carries one (everything but country).
  std::optional<std::string> state() const;
};

/// Lowercases ASCII and collapses whitespace runs to single spaces.
std::string normalize_alias(const std::string& text);

/// A text alias match: which record, via which alias, over which tokens.
struct AliasMatch {
  std::size_t record_index;
  std::string alias;        // normalized form that matched
  std::size_t token_begin;  // first matched token position in the text
  std::size_t token_count;
};

/// Immutable location table. Loaded once, then safe for concurrent reads.
class Gazetteer {
 public:
  Gazetteer() = default;
  explicit Gazetteer(std::vector<LocationRecord> records);

  const std::vector<LocationRecord>& records() const { return records_; }
  const LocationRecord* by_loc_id(const std::string& loc_id) const;

  /// Case-insensitive word-boundary scan. Longest matches win: a match is
  /// dropped when a kept match spanning more tokens overlaps it. An alias
  /// shared by several records yields one AliasMatch per record.
  std::vector<AliasMatch> find_matches(const std::string& text) const;

 private:
  std::vector<LocationRecord> records_;
  std::map<std::string, std::vector<std::size_t>> alias_index_;  // normalized alias -> records
  std::map<std::string, std::size_t> id_index_;
  std::size_t max_alias_tokens_ = 0;
};

/// Records mentioned in the text, deduplicated, via Gazetteer::find_matches.
std::vector<const LocationRecord*> lt_lookup(const std::string& text, const Gazetteer& gaz);

/// Geohash cover of the record's bounding box.
std::set<Geohash> location_geohashes(const LocationRecord& rec, int length = 4,
                                     std::size_t max_cells = 4096);

/// Loads the tab-separated gazetteer file. Columns: loc_id, name, aliases
/// (|-separated), level, geochain (>-separated, own level first), south,
/// west, north, east, lat, lon. Aliases shorter than 3 characters are
/// rejected unless whitelisted. Any bad line is a GazetteerFormatError.
Gazetteer load_gazetteer(const std::string& path,
                         const std::set<std::string>& short_alias_whitelist = {});

/// Writes records in the load_gazetteer column format.
void write_gazetteer(const std::string& path, const std::vector<LocationRecord>& records);

}  // namespace localnews
