#include "localnews/serialization.hpp"

#include <fstream>

#include <json.hpp>

namespace localnews {

namespace {

using nlohmann::json;

json geohash_array(const std::set<Geohash>& cells) {
  json list = json::array();
  for (const auto& gh : cells) list.push_back(gh.text());
  return list;
}

}  // namespace

std::string stamp_to_json(const StampResult& stamp) {
  json obj;
  obj["article_id"] = stamp.article_id;
  obj["geohashes"] = geohash_array(stamp.geohashes);
  json prov = json::object();
  for (const auto& [gh, sources] : stamp.provenance) {
    json list = json::array();
    for (const auto& s : sources) list.push_back(to_string(s));
    prov[gh.text()] = std::move(list);
  }
  obj["provenance"] = std::move(prov);
  obj["rules_fired"] = stamp.rules_fired;
  return obj.dump();
}

StampResult stamp_from_json(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad stamp JSON: ") + e.what());
  }
  StampResult stamp;
  try {
    stamp.article_id = obj.at("article_id").get<std::string>();
    for (const auto& gh : obj.at("geohashes")) stamp.geohashes.insert(Geohash(gh.get<std::string>()));
    for (const auto& [gh, sources] : obj.at("provenance").items()) {
      auto& set = stamp.provenance[Geohash(gh)];
      for (const auto& s : sources) set.insert(source_from_string(s.get<std::string>()));
    }
    for (const auto& r : obj.at("rules_fired")) stamp.rules_fired.insert(r.get<int>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad stamp record: ") + e.what());
  }
  return stamp;
}

std::vector<StampResult> load_stamps(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stamp file " + path);
  std::vector<StampResult> stamps;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      stamps.push_back(stamp_from_json(line));
    } catch (const ValidationError& e) {
      throw ValidationError("stamp line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return stamps;
}

void write_stamps(const std::string& path, const std::vector<StampResult>& stamps) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write stamp file " + path);
  for (const auto& stamp : stamps) out << stamp_to_json(stamp) << '\n';
}

std::string impression_to_json(const Impression& imp) {
  json obj;
  obj["user_lat"] = imp.user_point.lat;
  obj["user_lon"] = imp.user_point.lon;
  obj["article_id"] = imp.article_id;
  if (imp.user_geochain) obj["user_geochain"] = *imp.user_geochain;
  if (imp.article_locations) obj["article_locations"] = *imp.article_locations;
  return obj.dump();
}

Impression impression_from_json(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad impression JSON: ") + e.what());
  }
  Impression imp;
  try {
    imp.user_point = LatLon(obj.at("user_lat").get<double>(), obj.at("user_lon").get<double>());
    imp.article_id = obj.at("article_id").get<std::string>();
    if (obj.contains("user_geochain")) {
      imp.user_geochain = obj.at("user_geochain").get<std::vector<std::string>>();
    }
    if (obj.contains("article_locations")) {
      std::set<std::string> locs;
      for (const auto& l : obj.at("article_locations")) locs.insert(l.get<std::string>());
      imp.article_locations = std::move(locs);
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad impression record: ") + e.what());
  }
  if (imp.article_id.empty()) throw ValidationError("impression without article_id");
  return imp;
}

ImpressionLoadResult load_impressions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open impressions file " + path);
  ImpressionLoadResult result;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      result.impressions.push_back(impression_from_json(line));
    } catch (const ValidationError& e) {
      ++result.skipped;
      result.skipped_lines.emplace_back(line_no, e.what());
    }
  }
  return result;
}

void write_impressions(const std::string& path, const std::vector<Impression>& impressions) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write impressions file " + path);
  for (const auto& imp : impressions) out << impression_to_json(imp) << '\n';
}

std::string feed_response_to_json(const FeedResponse& response) {
  json obj;
  obj["articles"] = response.articles;
  obj["source"] = to_string(response.source);
  obj["user_geohash"] = response.user_geohash.text();
  if (response.backfill_city) {
    obj["backfill_city"] = *response.backfill_city;
  } else {
    obj["backfill_city"] = nullptr;
  }
  return obj.dump();
}

}  // namespace localnews
