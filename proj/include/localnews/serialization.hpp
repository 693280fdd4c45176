#pragma once

#include <string>
#include <vector>

#include "localnews/metrics.hpp"
#include "localnews/serving.hpp"
#include "localnews/stamper.hpp"

namespace localnews {

std::string stamp_to_json(const StampResult& stamp);
StampResult stamp_from_json(const std::string& line);

std::vector<StampResult> load_stamps(const std::string& path);
void write_stamps(const std::string& path, const std::vector<StampResult>& stamps);

/// Impressions file line: {"user_lat", "user_lon", "article_id",
/// optional "user_geochain", optional "article_locations"}. Stamps are
/// attached later, per evaluation arm.
std::string impression_to_json(const Impression& imp);
Impression impression_from_json(const std::string& line);

struct ImpressionLoadResult {
  std::vector<Impression> impressions;
  std::size_t skipped = 0;
  std::vector<std::pair<std::size_t, std::string>> skipped_lines;
};

/// Line-delimited impressions; invalid lines are skipped and reported,
/// mirroring corpus loading.
ImpressionLoadResult load_impressions(const std::string& path);
void write_impressions(const std::string& path, const std::vector<Impression>& impressions);

std::string feed_response_to_json(const FeedResponse& response);

}  // namespace localnews
