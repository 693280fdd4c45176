#include "localnews/geocoder.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <json.hpp>

namespace localnews {

namespace {

using nlohmann::json;

std::string entity_type_for(AdminLevel level) {
  switch (level) {
    case AdminLevel::City: return "City";
    case AdminLevel::CountyOrDistrict: return "County";
    case AdminLevel::State: return "State";
    case AdminLevel::Country: return "Country";
  }
  return "City";
}

}  // namespace

std::string to_string(Confidence c) {
  switch (c) {
    case Confidence::High: return "High";
    case Confidence::Medium: return "Medium";
    case Confidence::Low: return "Low";
  }
  return "Low";
}

Confidence confidence_from_string(const std::string& text) {
  if (text == "High") return Confidence::High;
  if (text == "Medium") return Confidence::Medium;
  if (text == "Low") return Confidence::Low;
  throw ValidationError("unknown confidence \"" + text + "\"");
}

void GeocoderConfig::validate() const {
  if (!(qps_limit > 0)) throw ValidationError("qps_limit must be > 0");
  if (!(timeout_s > 0)) throw ValidationError("timeout must be > 0");
}

std::vector<GeocodeResult> OfflineGeocoder::geocode(const std::string& query) {
  if (query.empty()) {
    throw ValidationError("geocode query is empty");
  }
  // One result per matched record; High only when some match used the
  // record's canonical name.
  std::map<std::size_t, Confidence> matched;
  for (const auto& m : gaz_.find_matches(query)) {
    const auto& rec = gaz_.records()[m.record_index];
    const Confidence c =
        m.alias == normalize_alias(rec.name) ? Confidence::High : Confidence::Medium;
    auto [it, inserted] = matched.emplace(m.record_index, c);
    if (!inserted && c > it->second) it->second = c;
  }
  std::vector<GeocodeResult> results;
  results.reserve(matched.size());
  for (const auto& [idx, conf] : matched) {
    const auto& rec = gaz_.records()[idx];
    GeocodeResult r;
    r.matched_name = rec.name;
    r.entity_type = entity_type_for(rec.level);
    r.confidence = conf;
    r.point = rec.point;
    r.bbox = rec.bbox;
    r.source_loc_id = rec.loc_id;
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const GeocodeResult& a, const GeocodeResult& b) {
    return a.source_loc_id < b.source_loc_id;
  });
  return results;
}

RateLimiter::RateLimiter(double limit) {
  if (!(limit > 0)) throw ValidationError("rate limit must be > 0");
  limit_ = static_cast<std::size_t>(std::floor(limit));
  if (limit_ == 0) limit_ = 1;
}

void RateLimiter::acquire() {
  using namespace std::chrono_literals;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    while (!window_.empty() && window_.front() <= now - 1s) window_.pop_front();
    if (window_.size() < limit_) {
      window_.push_back(now);
      return;
    }
    cv_.wait_until(lock, window_.front() + 1s + 1ms);
  }
}

ThrottledCachingGeocoder::ThrottledCachingGeocoder(Geocoder& upstream,
                                                   const GeocoderConfig& config)
    : upstream_(upstream), limiter_(config.qps_limit), capacity_(config.cache_capacity) {
  config.validate();
}

std::optional<ThrottledCachingGeocoder::ResultList> ThrottledCachingGeocoder::cache_get(
    const std::string& query) {
  auto it = cache_.find(query);
  if (it == cache_.end()) return std::nullopt;
  lru_.splice(lru_.begin(), lru_, it->second);
  return it->second->second;
}

void ThrottledCachingGeocoder::cache_put(const std::string& query, const ResultList& results) {
  if (capacity_ == 0) return;
  auto it = cache_.find(query);
  if (it != cache_.end()) {
    it->second->second = results;
    lru_.splice(lru_.begin(), lru_, it->second);
    return;
  }
  lru_.emplace_front(query, results);
  cache_[query] = lru_.begin();
  while (cache_.size() > capacity_) {
    cache_.erase(lru_.back().first);
    lru_.pop_back();
  }
}

std::vector<GeocodeResult> ThrottledCachingGeocoder::geocode(const std::string& query) {
  std::shared_future<ResultList> waiting;
  std::promise<ResultList> mine;
  {
    std::lock_guard lock(mutex_);
    if (auto hit = cache_get(query)) return *hit;
    auto it = inflight_.find(query);
    if (it != inflight_.end()) {
      waiting = it->second;
    } else {
      inflight_.emplace(query, mine.get_future().share());
    }
  }
  if (waiting.valid()) return waiting.get();

  try {
    limiter_.acquire();
    ResultList results = upstream_.geocode(query);
    {
      std::lock_guard lock(mutex_);
      cache_put(query, results);
      inflight_.erase(query);
    }
    mine.set_value(results);
    return results;
  } catch (...) {
    {
      std::lock_guard lock(mutex_);
      inflight_.erase(query);
    }
    mine.set_exception(std::current_exception());
    throw;
  }
}

RemoteGeocoder::RemoteGeocoder(const GeocoderConfig& config) : config_(config) {
  config_.validate();
  if (config_.endpoint.empty()) {
    throw ValidationError("remote geocoder requires an endpoint");
  }
}

std::vector<GeocodeResult> parse_geocode_response(const std::string& body) {
  json obj;
  try {
    obj = json::parse(body);
  } catch (const json::exception& e) {
    throw GeocoderResponseError(std::string("malformed geocode response: ") + e.what());
  }
  if (!obj.is_object() || !obj.contains("results") || !obj["results"].is_array()) {
    throw GeocoderResponseError("geocode response missing results array");
  }
  std::vector<GeocodeResult> results;
  for (const auto& item : obj["results"]) {
    try {
      GeocodeResult r;
      r.matched_name = item.at("name").get<std::string>();
      r.entity_type = item.value("entityType", std::string());
      r.confidence = confidence_from_string(item.at("confidence").get<std::string>());
      const auto& pt = item.at("point");
      r.point = LatLon(pt.at("lat").get<double>(), pt.at("lon").get<double>());
      const auto& bb = item.at("bbox");
      r.bbox = BoundingBox(bb.at("south").get<double>(), bb.at("west").get<double>(),
                           bb.at("north").get<double>(), bb.at("east").get<double>());
      results.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw GeocoderResponseError(std::string("malformed geocode result: ") + e.what());
    } catch (const ValidationError& e) {
      throw GeocoderResponseError(std::string("invalid geocode result: ") + e.what());
    }
  }
  return results;
}

std::vector<GeocodeResult> RemoteGeocoder::geocode(const std::string& query) {
  if (query.empty()) {
    throw ValidationError("geocode query is empty");
  }
  // endpoint = scheme://host[:port][/path]
  const auto scheme_end = config_.endpoint.find("://");
  std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = config_.endpoint.find('/', host_begin);
  const std::string origin = config_.endpoint.substr(0, path_begin);
  const std::string path =
      path_begin == std::string::npos ? "/" : config_.endpoint.substr(path_begin);

  httplib::Client client(origin);
  client.set_connection_timeout(static_cast<time_t>(config_.timeout_s),
                                static_cast<time_t>(config_.timeout_s * 1e6) % 1000000);
  client.set_read_timeout(static_cast<time_t>(config_.timeout_s),
                          static_cast<time_t>(config_.timeout_s * 1e6) % 1000000);

  httplib::Params params{{"q", query}};
  if (!config_.api_key.empty()) params.emplace("key", config_.api_key);
  auto res = client.Get(path, params, httplib::Headers{});
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
        err == httplib::Error::Write) {
      throw GeocoderTimeoutError("geocode request timed out: " + httplib::to_string(err));
    }
    throw GeocoderError("geocode request failed: " + httplib::to_string(err));
  }
  if (res->status == 429) {
    throw GeocoderRateLimitError("geocoder rejected request: rate limited");
  }
  if (res->status == 401 || res->status == 403) {
    throw GeocoderAuthError("geocoder rejected credentials (HTTP " +
                            std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    throw GeocoderResponseError("unexpected geocoder status " + std::to_string(res->status));
  }
  return parse_geocode_response(res->body);
}

std::map<Geohash, Confidence> bma_geohashes(const std::vector<GeocodeResult>& results,
                                            int length, Confidence min_confidence,
                                            std::size_t max_cells) {
  std::map<Geohash, Confidence> cells;
  for (const auto& r : results) {
    if (r.confidence < min_confidence) continue;
    for (const auto& gh : cover(r.bbox, length, max_cells)) {
      auto [it, inserted] = cells.emplace(gh, r.confidence);
      if (!inserted && r.confidence > it->second) it->second = r.confidence;
    }
  }
  return cells;
}

}  // namespace localnews
