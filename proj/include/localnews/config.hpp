#pragma once

#include <cstdint>
#include <string>

namespace localnews {

/// Runtime configuration. Every constant the pipeline depends on lives
/// here so a run is reproducible from the printed config alone.
struct AppConfig {
  std::size_t trim_words = 10;
  int geohash_len = 4;
  int prefix_len = 2;
  double tau_geohash3 = 0.2;
  double tau_admin = 0.2;
  int min_articles = 20;
  std::size_t min_k = 3;
  std::size_t max_cover_cells = 4096;
  double qps_limit = 50.0;
  double timeout_s = 10.0;
  std::size_t cache_capacity = 10000;
  int affinity_window_days = 30;
  std::string geocoder_endpoint;  // empty: gazetteer-backed offline geocoder
  std::string geocoder_api_key;

  struct Paths {
    std::string gazetteer;
    std::string bma_gazetteer;  // geocoder backing; defaults to gazetteer
    std::string cities;
    std::string affinity;
    std::string corpus;
    std::string dma;
    std::string stamps;
    std::string impressions;
  } paths;

  void validate() const;

  /// Relative paths in the file are resolved against its directory.
  static AppConfig load(const std::string& path);

  /// Applies LOCALNEWS_* environment overrides (e.g. LOCALNEWS_MIN_K).
  void apply_env_overrides();

  std::string to_json() const;
};

}  // namespace localnews
