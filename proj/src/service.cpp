#include "localnews/service.hpp"

#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "localnews/serialization.hpp"

namespace localnews {

namespace {

using nlohmann::json;

void reply_error(httplib::Response& res, int status, const std::string& message) {
  json obj;
  obj["error"] = message;
  res.status = status;
  res.set_content(obj.dump(), "application/json");
}

}  // namespace

struct FeedService::Impl {
  AppConfig config;
  Gazetteer gazetteer;
  Gazetteer bma_gazetteer;
  std::unique_ptr<Geocoder> base_geocoder;
  std::unique_ptr<ThrottledCachingGeocoder> geocoder;
  std::map<std::string, AffinityEntry> affinity;
  std::vector<PopularCity> cities;

  mutable std::mutex snapshot_mutex;
  std::shared_ptr<const Snapshot> current;
  std::mutex ingest_mutex;

  httplib::Server server;
  std::thread server_thread;

  explicit Impl(const AppConfig& cfg) : config(cfg) {
    gazetteer = load_gazetteer(config.paths.gazetteer);
    bma_gazetteer = config.paths.bma_gazetteer.empty() ||
                            config.paths.bma_gazetteer == config.paths.gazetteer
                        ? gazetteer
                        : load_gazetteer(config.paths.bma_gazetteer);
    GeocoderConfig gc;
    gc.qps_limit = config.qps_limit;
    gc.timeout_s = config.timeout_s;
    gc.cache_capacity = config.cache_capacity;
    gc.endpoint = config.geocoder_endpoint;
    gc.api_key = config.geocoder_api_key;
    if (config.geocoder_endpoint.empty()) {
      base_geocoder = std::make_unique<OfflineGeocoder>(bma_gazetteer);
    } else {
      base_geocoder = std::make_unique<RemoteGeocoder>(gc);
    }
    geocoder = std::make_unique<ThrottledCachingGeocoder>(*base_geocoder, gc);
    if (!config.paths.affinity.empty()) affinity = load_affinity(config.paths.affinity);
    cities = load_cities(config.paths.cities);

    auto snap = std::make_shared<Snapshot>();
    if (!config.paths.corpus.empty()) {
      snap->articles = load_corpus(config.paths.corpus).articles;
      StampRun run = stamp_corpus(snap->articles, gazetteer, *geocoder, affinity, config);
      snap->stamps = std::move(run.stamps);
    }
    snap->index = build_index(snap->stamps, snap->articles);
    {
      std::lock_guard lock(snapshot_mutex);
      current = std::move(snap);
    }
    register_routes();
  }

  std::shared_ptr<const Snapshot> get_snapshot() const {
    std::lock_guard lock(snapshot_mutex);
    return current;
  }

  void swap_snapshot(std::shared_ptr<const Snapshot> next) {
    std::lock_guard lock(snapshot_mutex);
    current = std::move(next);
  }

  IngestSummary do_ingest(const std::string& body) {
    // One ingest at a time; readers keep the old snapshot until the swap.
    std::lock_guard ingest_lock(ingest_mutex);
    auto base = get_snapshot();

    IngestSummary summary;
    std::set<std::string> known;
    for (const auto& a : base->articles) known.insert(a.id);

    std::vector<Article> added;
    std::istringstream lines(body);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      try {
        Article a = parse_article_json(line);
        if (!known.insert(a.id).second) throw ValidationError("duplicate article id " + a.id);
        added.push_back(std::move(a));
      } catch (const ValidationError&) {
        ++summary.skipped;
      }
    }

    StampRun run = stamp_corpus(added, gazetteer, *geocoder, affinity, config);
    summary.ingested = added.size();
    summary.rule_counts = run.rule_counts;

    auto next = std::make_shared<Snapshot>();
    next->articles = base->articles;
    next->articles.insert(next->articles.end(), added.begin(), added.end());
    next->stamps = base->stamps;
    next->stamps.insert(next->stamps.end(), run.stamps.begin(), run.stamps.end());
    next->index = build_index(next->stamps, next->articles);
    swap_snapshot(std::move(next));
    return summary;
  }

  void register_routes() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });

    server.Get("/feed", [this](const httplib::Request& req, httplib::Response& res) {
      if (!req.has_param("lat") || !req.has_param("lon")) {
        return reply_error(res, 400, "lat and lon are required");
      }
      try {
        const LatLon user(std::stod(req.get_param_value("lat")),
                          std::stod(req.get_param_value("lon")));
        std::size_t count = 10;
        if (req.has_param("count")) {
          const long long parsed = std::stoll(req.get_param_value("count"));
          if (parsed < 1) throw ValidationError("count must be >= 1");
          count = static_cast<std::size_t>(parsed);
        }
        auto snap = get_snapshot();
        const FeedResponse feed = serve(user, count, snap->index, cities, config.min_k);
        res.set_content(feed_response_to_json(feed), "application/json");
      } catch (const std::exception& e) {
        reply_error(res, 400, e.what());
      }
    });

    server.Get(R"(/articles/([^/]+)/locations)",
               [this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 auto snap = get_snapshot();
                 for (const auto& stamp : snap->stamps) {
                   if (stamp.article_id == id) {
                     res.set_content(stamp_to_json(stamp), "application/json");
                     return;
                   }
                 }
                 reply_error(res, 404, "unknown article " + id);
               });

    server.Post("/articles", [this](const httplib::Request& req, httplib::Response& res) {
      try {
        const IngestSummary summary = do_ingest(req.body);
        json obj;
        obj["ingested"] = summary.ingested;
        obj["skipped"] = summary.skipped;
        json rules = json::object();
        for (const auto& [rule, count] : summary.rule_counts) {
          rules[std::to_string(rule)] = count;
        }
        obj["rules"] = std::move(rules);
        res.set_content(obj.dump(), "application/json");
      } catch (const std::exception& e) {
        reply_error(res, 500, e.what());
      }
    });
  }
};

FeedService::FeedService(const AppConfig& config) : impl_(std::make_unique<Impl>(config)) {}

FeedService::~FeedService() {
  stop();
}

void FeedService::run(const std::string& host, int port) {
  impl_->server.listen(host, port);
}

void FeedService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

int FeedService::start_background(const std::string& host) {
  const int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw Error("cannot bind feed service socket");
  impl_->server_thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

std::shared_ptr<const FeedService::Snapshot> FeedService::snapshot() const {
  return impl_->get_snapshot();
}

FeedService::IngestSummary FeedService::ingest(const std::string& body) {
  return impl_->do_ingest(body);
}

}  // namespace localnews
