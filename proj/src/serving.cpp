#include "localnews/serving.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "localnews/metrics.hpp"

namespace localnews {

std::size_t FeedIndex::supply(const Geohash& cell) const {
  auto it = postings.find(cell);
  return it == postings.end() ? 0 : it->second.size();
}

PopularCity::PopularCity(std::string city_name, LatLon city_point)
    : name(std::move(city_name)), point(city_point), geohash4(encode(city_point, 4)) {
  if (name.empty()) throw ValidationError("popular city without a name");
}

std::string to_string(FeedResponse::SourceKind kind) {
  return kind == FeedResponse::SourceKind::Local ? "local" : "backfill";
}

FeedIndex build_index(const std::vector<StampResult>& stamps,
                      const std::vector<Article>& articles, std::int64_t built_at) {
  std::map<std::string, const Article*> by_id;
  for (const auto& a : articles) by_id.emplace(a.id, &a);

  FeedIndex index;
  index.built_at = built_at;
  for (const auto& stamp : stamps) {
    auto it = by_id.find(stamp.article_id);
    if (it == by_id.end()) {
      throw ValidationError("stamp references unknown article \"" + stamp.article_id + "\"");
    }
    for (const auto& gh : stamp.geohashes) {
      index.postings[gh].push_back(Posting{stamp.article_id, it->second->published_at});
    }
  }
  for (auto& [gh, list] : index.postings) {
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) {
      if (a.rank_key != b.rank_key) return a.rank_key > b.rank_key;
      return a.article_id < b.article_id;
    });
  }
  return index;
}

FeedResponse serve(const LatLon& user, std::size_t count, const FeedIndex& index,
                   const std::vector<PopularCity>& cities, std::size_t min_k) {
  if (count < 1) throw ValidationError("feed count must be >= 1");

  FeedResponse response;
  response.user_geohash = encode(user, 4);

  const std::vector<Posting>* local = nullptr;
  if (auto it = index.postings.find(response.user_geohash); it != index.postings.end()) {
    local = &it->second;
  }
  const std::size_t local_supply = local ? local->size() : 0;

  if (local_supply >= min_k) {
    response.source = FeedResponse::SourceKind::Local;
    for (const auto& p : *local) {
      if (response.articles.size() >= count) break;
      response.articles.push_back(p.article_id);
    }
    return response;
  }

  if (cities.empty()) {
    throw ValidationError("backfill requires a non-empty popular-cities list");
  }
  const PopularCity* nearest = &cities.front();
  double best = haversine_km(user, nearest->point);
  for (const auto& city : cities) {
    const double d = haversine_km(user, city.point);
    if (d < best || (d == best && city.name < nearest->name)) {
      nearest = &city;
      best = d;
    }
  }

  response.source = FeedResponse::SourceKind::Backfill;
  response.backfill_city = nearest->name;

  std::set<std::string> seen;
  if (local) {
    for (const auto& p : *local) {
      if (response.articles.size() >= count) break;
      if (seen.insert(p.article_id).second) response.articles.push_back(p.article_id);
    }
  }
  if (auto it = index.postings.find(nearest->geohash4); it != index.postings.end()) {
    for (const auto& p : it->second) {
      if (response.articles.size() >= count) break;
      if (seen.insert(p.article_id).second) response.articles.push_back(p.article_id);
    }
  }
  return response;
}

std::vector<PopularCity> load_cities(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open cities file " + path);
  std::vector<PopularCity> cities;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string name, lat_text, lon_text;
    if (!std::getline(row, name, '\t') || !std::getline(row, lat_text, '\t') ||
        !std::getline(row, lon_text, '\t')) {
      throw ValidationError("cities line " + std::to_string(line_no) + ": expected 3 columns");
    }
    try {
      cities.emplace_back(name, LatLon(std::stod(lat_text), std::stod(lon_text)));
    } catch (const std::exception& e) {
      throw ValidationError("cities line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cities;
}

void write_cities(const std::string& path, const std::vector<PopularCity>& cities) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write cities file " + path);
  char buf[64];
  for (const auto& c : cities) {
    std::snprintf(buf, sizeof(buf), "%s\t%.6f\t%.6f", c.name.c_str(), c.point.lat, c.point.lon);
    out << buf << '\n';
  }
}

}  // namespace localnews
