#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "localnews/corpus.hpp"
#include "localnews/gazetteer.hpp"
#include "localnews/metrics.hpp"
#include "localnews/serving.hpp"

namespace localnews {

/// Deterministic synthetic benchmark world: states aligned to length-2
/// cells, counties to length-3 cells, cities inside length-4 cells;
/// local publishers with a home county, regional/outlier coverage and a
/// DMA table; articles typed to exercise every stamping rule; impressions
/// with users placed in, near and far from each article's true location.
struct SynthWorld {
  std::vector<LocationRecord> lt_records;        // location-table gazetteer
  std::vector<LocationRecord> bma_only_records;  // visible to the geocoder only
  std::vector<Article> articles;
  std::vector<Impression> impressions;
  DmaTable dma;
  std::vector<PopularCity> cities;
  std::vector<std::string> local_publishers;
  std::string truth_json;  // ground truth: homes, singletons, article types
};

SynthWorld generate_world(std::uint64_t seed);

/// Writes gazetteer.tsv, bma_gazetteer.tsv, corpus.jsonl, impressions.jsonl,
/// dma.json, cities.tsv, publishers.txt, truth.json and config.json into
/// out_dir. Same seed, same bytes.
void write_world(const SynthWorld& world, const std::string& out_dir);

/// SplitMix64; self-contained so outputs do not depend on the standard
/// library's distribution implementations.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [lo, hi].
  std::int64_t range(std::int64_t lo, std::int64_t hi);

 private:
  std::uint64_t state_;
};

}  // namespace localnews
