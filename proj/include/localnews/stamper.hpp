#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "localnews/geocoder.hpp"
#include "localnews/geohash.hpp"

namespace localnews {

/// Where a stamped geohash came from.
enum class Source { Pub, Lt, Bma };

std::string to_string(Source s);
Source source_from_string(const std::string& text);

/// Per-article candidate geohashes from the three detectors. All cells are
/// length 4. pub is absent when the publisher has no affinity entry.
struct CandidateSets {
  std::map<Geohash, std::set<std::string>> lt;  // cell -> contributing loc_ids
  std::map<Geohash, Confidence> bma;            // cell -> strongest confidence
  std::optional<std::set<Geohash>> pub;
};

/// The stamped impact area of one article: the union of the cells the
/// rules selected, with per-cell source provenance and the set of rules
/// that stamped at least one cell. An empty result carries exactly {6}.
struct StampResult {
  std::string article_id;
  std::set<Geohash> geohashes;
  std::map<Geohash, std::set<Source>> provenance;
  std::set<int> rules_fired;
};

/// Ensemble stamping rules, evaluated cumulatively:
///   1. publisher affinity present -> stamp its cells.
///   2. affinity present and some LT cell shares the length-prefix_len
///      prefix with some affinity cell -> stamp all LT cells.
///   3. affinity present and some High/Medium BMA cell shares the prefix
///      with some affinity cell -> stamp all High/Medium BMA cells.
///   4. no affinity, and some LT cell shares the prefix with some BMA
///      cell -> stamp all LT and all BMA cells.
///   5. no affinity and no LT candidates -> stamp High-confidence BMA
///      cells only.
///   6. nothing stamped -> empty result (precision over recall).
StampResult stamp(const std::string& article_id, const CandidateSets& cands, int prefix_len = 2);

}  // namespace localnews
