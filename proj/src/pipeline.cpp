#include "localnews/pipeline.hpp"

namespace localnews {

CandidateExtraction extract_candidates(const Article& article, const Gazetteer& gaz,
                                       Geocoder& geocoder,
                                       const std::map<std::string, AffinityEntry>& affinity,
                                       const AppConfig& config) {
  CandidateExtraction out;

  for (const LocationRecord* rec : lt_lookup(article_full_text(article), gaz)) {
    try {
      for (const auto& gh : location_geohashes(*rec, config.geohash_len, config.max_cover_cells)) {
        out.cands.lt[gh].insert(rec->loc_id);
      }
    } catch (const CoverageTooLargeError&) {
      ++out.oversize_locations;
    }
  }

  const std::string query = build_geocode_query(article, config.trim_words);
  if (!query.empty()) {
    std::vector<GeocodeResult> results = geocoder.geocode(query);
    // Drop oversize results before covering so one continental hit does
    // not sink the rest.
    std::vector<GeocodeResult> usable;
    for (auto& r : results) {
      try {
        cover(r.bbox, config.geohash_len, config.max_cover_cells);
        usable.push_back(std::move(r));
      } catch (const CoverageTooLargeError&) {
        ++out.oversize_locations;
      }
    }
    out.cands.bma = bma_geohashes(usable, config.geohash_len, Confidence::Medium,
                                  config.max_cover_cells);
  }

  if (auto it = affinity.find(article.publisher); it != affinity.end()) {
    out.cands.pub = it->second.geohashes;
  }
  return out;
}

StampRun stamp_corpus(const std::vector<Article>& articles, const Gazetteer& gaz,
                      Geocoder& geocoder, const std::map<std::string, AffinityEntry>& affinity,
                      const AppConfig& config) {
  StampRun run;
  for (int rule = 1; rule <= 6; ++rule) run.rule_counts[rule] = 0;
  run.stamps.reserve(articles.size());
  for (const auto& article : articles) {
    StampResult result;
    try {
      auto extraction = extract_candidates(article, gaz, geocoder, affinity, config);
      run.oversize_locations += extraction.oversize_locations;
      result = stamp(article.id, extraction.cands, config.prefix_len);
    } catch (const Error&) {
      ++run.failed_articles;
      result = StampResult{article.id, {}, {}, {6}};
    }
    for (int rule : result.rules_fired) ++run.rule_counts[rule];
    run.stamps.push_back(std::move(result));
  }
  return run;
}

}  // namespace localnews
