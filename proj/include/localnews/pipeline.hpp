#pragma once

#include <map>
#include <string>
#include <vector>

#include "localnews/affinity.hpp"
#include "localnews/config.hpp"
#include "localnews/corpus.hpp"
#include "localnews/gazetteer.hpp"
#include "localnews/geocoder.hpp"
#include "localnews/stamper.hpp"

namespace localnews {

/// Candidate sets for one article: LT lookup over the full text, geocoder
/// over the trimmed query (High+Medium kept), publisher affinity cells.
/// Locations whose cover exceeds the cell cap are skipped and counted.
struct CandidateExtraction {
  CandidateSets cands;
  std::size_t oversize_locations = 0;
};

CandidateExtraction extract_candidates(const Article& article, const Gazetteer& gaz,
                                       Geocoder& geocoder,
                                       const std::map<std::string, AffinityEntry>& affinity,
                                       const AppConfig& config);

struct StampRun {
  std::vector<StampResult> stamps;          // one per article, corpus order
  std::map<int, std::size_t> rule_counts;   // rule id -> articles that fired it
  std::size_t failed_articles = 0;
  std::size_t oversize_locations = 0;
};

/// Stamps every article. Per-article failures produce an empty rule-6
/// stamp and are counted.
StampRun stamp_corpus(const std::vector<Article>& articles, const Gazetteer& gaz,
                      Geocoder& geocoder, const std::map<std::string, AffinityEntry>& affinity,
                      const AppConfig& config);

}  // namespace localnews
