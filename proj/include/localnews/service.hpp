#pragma once

#include <memory>
#include <mutex>
#include <string>

#include "localnews/config.hpp"
#include "localnews/pipeline.hpp"
#include "localnews/serving.hpp"

namespace localnews {

/// HTTP feed service.
///   GET  /feed?lat=&lon=&count=      -> FeedResponse
///   GET  /articles/{id}/locations    -> StampResult
///   POST /articles                   -> ingest line-delimited articles,
///                                       stamp, rebuild, swap the snapshot
///   GET  /healthz                    -> ok
/// Reads serve against an immutable snapshot; ingestion builds a new one
/// and swaps it under a lock.
class FeedService {
 public:
  explicit FeedService(const AppConfig& config);
  ~FeedService();

  /// Blocks until the server stops.
  void run(const std::string& host, int port);
  void stop();

  /// Binds to an OS-assigned port and serves on a background thread.
  /// Returns the port. Used by tests.
  int start_background(const std::string& host);

  struct Snapshot {
    std::vector<Article> articles;
    std::vector<StampResult> stamps;
    FeedIndex index;
  };

  std::shared_ptr<const Snapshot> snapshot() const;

  struct IngestSummary {
    std::size_t ingested = 0;
    std::size_t skipped = 0;
    std::map<int, std::size_t> rule_counts;
  };

  /// Parses line-delimited article JSON, stamps the new articles and
  /// swaps in a rebuilt snapshot.
  IngestSummary ingest(const std::string& body);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace localnews
