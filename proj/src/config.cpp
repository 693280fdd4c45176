#include "localnews/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "localnews/errors.hpp"

namespace localnews {

namespace {

using nlohmann::json;

std::string resolve(const std::filesystem::path& base, const std::string& path) {
  if (path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (base / p).lexically_normal().string();
}

template <typename T>
void read_if_present(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

}  // namespace

void AppConfig::validate() const {
  if (trim_words < 1) throw ValidationError("trim_words must be >= 1");
  if (geohash_len < 1 || geohash_len > 8) throw ValidationError("geohash_len must lie in [1, 8]");
  if (prefix_len < 1) throw ValidationError("prefix_len must be >= 1");
  if (geohash_len < prefix_len) throw ValidationError("geohash_len must be >= prefix_len");
  if (!(tau_geohash3 > 0 && tau_geohash3 < 1)) throw ValidationError("tau_geohash3 must lie in (0, 1)");
  if (!(tau_admin > 0 && tau_admin < 1)) throw ValidationError("tau_admin must lie in (0, 1)");
  if (min_articles < 1) throw ValidationError("min_articles must be >= 1");
  if (min_k < 1) throw ValidationError("min_k must be >= 1");
  if (max_cover_cells < 1) throw ValidationError("max_cover_cells must be >= 1");
  if (!(qps_limit > 0)) throw ValidationError("qps_limit must be > 0");
  if (!(timeout_s > 0)) throw ValidationError("timeout_s must be > 0");
  if (affinity_window_days < 1) throw ValidationError("affinity_window_days must be >= 1");
}

AppConfig AppConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  json obj;
  try {
    in >> obj;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config JSON: ") + e.what());
  }

  AppConfig cfg;
  try {
    read_if_present(obj, "trim_words", cfg.trim_words);
    read_if_present(obj, "geohash_len", cfg.geohash_len);
    read_if_present(obj, "prefix_len", cfg.prefix_len);
    read_if_present(obj, "tau_geohash3", cfg.tau_geohash3);
    read_if_present(obj, "tau_admin", cfg.tau_admin);
    read_if_present(obj, "min_articles", cfg.min_articles);
    read_if_present(obj, "min_k", cfg.min_k);
    read_if_present(obj, "max_cover_cells", cfg.max_cover_cells);
    read_if_present(obj, "qps_limit", cfg.qps_limit);
    read_if_present(obj, "timeout_s", cfg.timeout_s);
    read_if_present(obj, "cache_capacity", cfg.cache_capacity);
    read_if_present(obj, "affinity_window_days", cfg.affinity_window_days);
    read_if_present(obj, "geocoder_endpoint", cfg.geocoder_endpoint);
    read_if_present(obj, "geocoder_api_key", cfg.geocoder_api_key);
    if (obj.contains("paths")) {
      const auto& paths = obj.at("paths");
      read_if_present(paths, "gazetteer", cfg.paths.gazetteer);
      read_if_present(paths, "bma_gazetteer", cfg.paths.bma_gazetteer);
      read_if_present(paths, "cities", cfg.paths.cities);
      read_if_present(paths, "affinity", cfg.paths.affinity);
      read_if_present(paths, "corpus", cfg.paths.corpus);
      read_if_present(paths, "dma", cfg.paths.dma);
      read_if_present(paths, "stamps", cfg.paths.stamps);
      read_if_present(paths, "impressions", cfg.paths.impressions);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad config field: ") + e.what());
  }

  const auto base = std::filesystem::path(path).parent_path();
  for (std::string* p : {&cfg.paths.gazetteer, &cfg.paths.bma_gazetteer, &cfg.paths.cities,
                         &cfg.paths.affinity, &cfg.paths.corpus, &cfg.paths.dma,
                         &cfg.paths.stamps, &cfg.paths.impressions}) {
    *p = resolve(base, *p);
  }
  if (cfg.paths.bma_gazetteer.empty()) cfg.paths.bma_gazetteer = cfg.paths.gazetteer;

  cfg.apply_env_overrides();
  cfg.validate();
  return cfg;
}

void AppConfig::apply_env_overrides() {
  auto env_num = [](const char* name, auto& out) {
    if (const char* v = std::getenv(name)) {
      out = static_cast<std::decay_t<decltype(out)>>(std::stod(v));
    }
  };
  auto env_str = [](const char* name, std::string& out) {
    if (const char* v = std::getenv(name)) out = v;
  };
  env_num("LOCALNEWS_TRIM_WORDS", trim_words);
  env_num("LOCALNEWS_GEOHASH_LEN", geohash_len);
  env_num("LOCALNEWS_PREFIX_LEN", prefix_len);
  env_num("LOCALNEWS_TAU_GEOHASH3", tau_geohash3);
  env_num("LOCALNEWS_TAU_ADMIN", tau_admin);
  env_num("LOCALNEWS_MIN_ARTICLES", min_articles);
  env_num("LOCALNEWS_MIN_K", min_k);
  env_num("LOCALNEWS_MAX_COVER_CELLS", max_cover_cells);
  env_num("LOCALNEWS_QPS_LIMIT", qps_limit);
  env_num("LOCALNEWS_TIMEOUT_S", timeout_s);
  env_num("LOCALNEWS_CACHE_CAPACITY", cache_capacity);
  env_num("LOCALNEWS_AFFINITY_WINDOW_DAYS", affinity_window_days);
  env_str("LOCALNEWS_GEOCODER_ENDPOINT", geocoder_endpoint);
  env_str("LOCALNEWS_GEOCODER_API_KEY", geocoder_api_key);
  env_str("LOCALNEWS_GAZETTEER", paths.gazetteer);
  env_str("LOCALNEWS_BMA_GAZETTEER", paths.bma_gazetteer);
  env_str("LOCALNEWS_CITIES", paths.cities);
  env_str("LOCALNEWS_AFFINITY", paths.affinity);
  env_str("LOCALNEWS_CORPUS", paths.corpus);
  env_str("LOCALNEWS_DMA", paths.dma);
  env_str("LOCALNEWS_STAMPS", paths.stamps);
  env_str("LOCALNEWS_IMPRESSIONS", paths.impressions);
}

std::string AppConfig::to_json() const {
  json obj;
  obj["trim_words"] = trim_words;
  obj["geohash_len"] = geohash_len;
  obj["prefix_len"] = prefix_len;
  obj["tau_geohash3"] = tau_geohash3;
  obj["tau_admin"] = tau_admin;
  obj["min_articles"] = min_articles;
  obj["min_k"] = min_k;
  obj["max_cover_cells"] = max_cover_cells;
  obj["qps_limit"] = qps_limit;
  obj["timeout_s"] = timeout_s;
  obj["cache_capacity"] = cache_capacity;
  obj["affinity_window_days"] = affinity_window_days;
  obj["geocoder_endpoint"] = geocoder_endpoint;
  obj["geocoder_api_key"] = geocoder_api_key.empty() ? "" : "<set>";
  obj["paths"] = {{"gazetteer", paths.gazetteer},
                  {"bma_gazetteer", paths.bma_gazetteer},
                  {"cities", paths.cities},
                  {"affinity", paths.affinity},
                  {"corpus", paths.corpus},
                  {"dma", paths.dma},
                  {"stamps", paths.stamps},
                  {"impressions", paths.impressions}};
  return obj.dump(2);
}

}  // namespace localnews
