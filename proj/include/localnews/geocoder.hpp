#pragma once

#include <condition_variable>
#include <deque>
#include <future>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "localnews/gazetteer.hpp"
#include "localnews/geohash.hpp"

namespace localnews {

enum class Confidence { Low = 0, Medium = 1, High = 2 };

std::string to_string(Confidence c);
Confidence confidence_from_string(const std::string& text);

/// One located entity for a query.
struct GeocodeResult {
  std::string matched_name;
  std::string entity_type;
  Confidence confidence = Confidence::Low;
  LatLon point;
  BoundingBox bbox;
  /// Gazetteer id when the backing implementation knows it. Not part of
  /// the remote wire contract.
  std::optional<std::string> source_loc_id;
};

struct GeocoderConfig {
  double qps_limit = 50.0;
  double timeout_s = 10.0;
  std::size_t cache_capacity = 10000;
  std::string endpoint;  // remote only
  std::string api_key;   // remote only

  void validate() const;
};

/// Query-to-locations contract. Implementations must tolerate concurrent
/// geocode() calls.
class Geocoder {
 public:
  virtual ~Geocoder() = default;
  virtual std::vector<GeocodeResult> geocode(const std::string& query) = 0;
};

/// Deterministic gazetteer-backed geocoder. Confidence is High for a
/// canonical-name match, Medium for any other alias, never Low.
class OfflineGeocoder : public Geocoder {
 public:
  explicit OfflineGeocoder(const Gazetteer& gaz) : gaz_(gaz) {}

  std::vector<GeocodeResult> geocode(const std::string& query) override;

 private:
  const Gazetteer& gaz_;
};

/// Sliding-window rate limiter: at most `limit` acquisitions in any
/// one-second window, callers beyond that block.
class RateLimiter {
 public:
  explicit RateLimiter(double limit);

  void acquire();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::chrono::steady_clock::time_point> window_;
  std::size_t limit_;
};

/// Decorator adding an LRU cache and upstream QPS throttling to any
/// geocoder. Identical queries hit upstream at most once: concurrent
/// duplicates share one in-flight call, later ones are served from cache.
class ThrottledCachingGeocoder : public Geocoder {
 public:
  ThrottledCachingGeocoder(Geocoder& upstream, const GeocoderConfig& config);

  std::vector<GeocodeResult> geocode(const std::string& query) override;

 private:
  using ResultList = std::vector<GeocodeResult>;

  std::optional<ResultList> cache_get(const std::string& query);
  void cache_put(const std::string& query, const ResultList& results);

  Geocoder& upstream_;
  RateLimiter limiter_;
  std::size_t capacity_;

  std::mutex mutex_;
  std::list<std::pair<std::string, ResultList>> lru_;
  std::unordered_map<std::string, decltype(lru_)::iterator> cache_;
  std::unordered_map<std::string, std::shared_future<ResultList>> inflight_;
};

/// HTTP client for the remote geocoding contract:
///   GET {endpoint}?q=<query>&key=<api_key>
///   -> {"results": [{"name", "entityType", "confidence",
///                    "point": {"lat", "lon"},
///                    "bbox": {"south", "west", "north", "east"}}]}
/// Timeouts, HTTP 429, HTTP 401/403 and unparseable bodies raise the
/// corresponding GeocoderError subclass.
class RemoteGeocoder : public Geocoder {
 public:
  explicit RemoteGeocoder(const GeocoderConfig& config);

  std::vector<GeocodeResult> geocode(const std::string& query) override;

 private:
  GeocoderConfig config_;
};

/// Parses a remote response body. Exposed for contract tests.
std::vector<GeocodeResult> parse_geocode_response(const std::string& body);

/// Union of cell covers for results at or above min_confidence; each cell
/// is tagged with the strongest confidence among the results covering it.
std::map<Geohash, Confidence> bma_geohashes(const std::vector<GeocodeResult>& results,
                                            int length = 4,
                                            Confidence min_confidence = Confidence::Medium,
                                            std::size_t max_cells = 4096);

}  // namespace localnews
