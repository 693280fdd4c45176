#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "localnews/corpus.hpp"
#include "localnews/geohash.hpp"
#include "localnews/stamper.hpp"

namespace localnews {

struct Posting {
  std::string article_id;
  std::int64_t rank_key = 0;  // published_at; newer first
};

/// Immutable retrieval index: one posting list per stamped length-4 cell,
/// sorted by rank_key descending, ties by article id ascending.
struct FeedIndex {
  std::map<Geohash, std::vector<Posting>> postings;
  std::int64_t built_at = 0;

  std::size_t supply(const Geohash& cell) const;
};

struct PopularCity {
  std::string name;
  LatLon point;
  Geohash geohash4;

  PopularCity(std::string city_name, LatLon city_point);
};

struct FeedResponse {
  enum class SourceKind { Local, Backfill };

  std::vector<std::string> articles;
  SourceKind source = SourceKind::Local;
  Geohash user_geohash{"s"};
  std::optional<std::string> backfill_city;
};

std::string to_string(FeedResponse::SourceKind kind);

/// Builds the index from stamp results; every stamp must reference an
/// article present in the corpus.
FeedIndex build_index(const std::vector<StampResult>& stamps,
                      const std::vector<Article>& articles, std::int64_t built_at = 0);

/// Serves the user's length-4 cell when it holds at least min_k articles;
/// otherwise backfills from the nearest popular city (haversine, ties by
/// name), keeping any local articles at the head and deduplicating.
FeedResponse serve(const LatLon& user, std::size_t count, const FeedIndex& index,
                   const std::vector<PopularCity>& cities, std::size_t min_k = 3);

/// Cities file: tab-separated rows "name<TAB>lat<TAB>lon".
std::vector<PopularCity> load_cities(const std::string& path);
void write_cities(const std::string& path, const std::vector<PopularCity>& cities);

}  // namespace localnews
