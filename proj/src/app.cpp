#include "localnews/app.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <set>

#include "localnews/serialization.hpp"
#include "localnews/synth.hpp"

namespace localnews {

namespace {

Gazetteer load_bma_gazetteer(const AppConfig& config) {
  if (!config.paths.bma_gazetteer.empty() &&
      config.paths.bma_gazetteer != config.paths.gazetteer) {
    return load_gazetteer(config.paths.bma_gazetteer);
  }
  return load_gazetteer(config.paths.gazetteer);
}

// Offline gazetteer-backed geocoder unless an endpoint is configured,
// always behind the cache and the QPS throttle.
struct GeocoderStack {
  std::unique_ptr<Geocoder> base;
  std::unique_ptr<ThrottledCachingGeocoder> client;

  GeocoderStack(const AppConfig& config, const Gazetteer& bma_gaz) {
    GeocoderConfig gc;
    gc.qps_limit = config.qps_limit;
    gc.timeout_s = config.timeout_s;
    gc.cache_capacity = config.cache_capacity;
    gc.endpoint = config.geocoder_endpoint;
    gc.api_key = config.geocoder_api_key;
    if (config.geocoder_endpoint.empty()) {
      base = std::make_unique<OfflineGeocoder>(bma_gaz);
    } else {
      base = std::make_unique<RemoteGeocoder>(gc);
    }
    client = std::make_unique<ThrottledCachingGeocoder>(*base, gc);
  }
};

}  // namespace

StampRun run_stamp(const AppConfig& config, std::ostream& log) {
  const Gazetteer gaz = load_gazetteer(config.paths.gazetteer);
  const Gazetteer bma_gaz = load_bma_gazetteer(config);
  GeocoderStack geocoder(config, bma_gaz);

  std::map<std::string, AffinityEntry> affinity;
  if (!config.paths.affinity.empty()) {
    affinity = load_affinity(config.paths.affinity);
  }

  const CorpusLoadResult corpus = load_corpus(config.paths.corpus);
  for (const auto& [line_no, reason] : corpus.skipped_lines) {
    log << "corpus line " << line_no << " skipped: " << reason << '\n';
  }

  StampRun run = stamp_corpus(corpus.articles, gaz, *geocoder.client, affinity, config);
  write_stamps(config.paths.stamps, run.stamps);

  log << "stamped " << run.stamps.size() << " articles (" << corpus.skipped
      << " corpus lines skipped, " << run.failed_articles << " failed, "
      << run.oversize_locations << " oversize locations dropped)\n";
  for (const auto& [rule, count] : run.rule_counts) {
    log << "  rule " << rule << ": " << count << '\n';
  }
  return run;
}

AffinityRunSummary run_affinity(const AppConfig& config,
                                const std::optional<std::string>& publishers_path,
                                std::ostream& log) {
  const Gazetteer gaz = load_gazetteer(config.paths.gazetteer);
  const Gazetteer bma_gaz = load_bma_gazetteer(config);
  GeocoderStack geocoder(config, bma_gaz);

  const CorpusLoadResult corpus = load_corpus(config.paths.corpus);
  std::map<std::string, std::vector<Article>> by_publisher;
  for (const auto& a : corpus.articles) by_publisher[a.publisher].push_back(a);

  std::optional<std::set<std::string>> wanted;
  if (publishers_path) {
    std::ifstream in(*publishers_path);
    if (!in) throw IoError("cannot open publishers file " + *publishers_path);
    wanted.emplace();
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) wanted->insert(line);
    }
  }

  AffinityParams params;
  params.tau_geohash3 = config.tau_geohash3;
  params.tau_admin = config.tau_admin;
  params.min_articles = config.min_articles;
  params.time_window_s = static_cast<std::int64_t>(config.affinity_window_days) * 86400;
  params.geohash_len = config.geohash_len;
  params.max_cover_cells = config.max_cover_cells;

  AffinityRunSummary summary;
  std::vector<AffinityEntry> entries;
  for (const auto& [publisher, articles] : by_publisher) {
    if (wanted && !wanted->count(publisher)) continue;
    ++summary.publishers_seen;
    auto entry = build_affinity(publisher, articles, gaz, *geocoder.client, params);
    if (!entry) {
      ++summary.below_min_articles;
      continue;
    }
    entries.push_back(std::move(*entry));
  }
  write_affinity(config.paths.affinity, entries);
  summary.entries_written = entries.size();
  log << "affinity: " << summary.entries_written << " entries for " << summary.publishers_seen
      << " publishers (" << summary.below_min_articles << " below thresholds)\n";
  return summary;
}

EvalReport run_eval(const AppConfig& config, std::ostream& log) {
  const Gazetteer gaz = load_gazetteer(config.paths.gazetteer);
  const std::vector<StampResult> stamps = load_stamps(config.paths.stamps);
  std::map<std::string, const StampResult*> stamp_by_id;
  for (const auto& s : stamps) stamp_by_id.emplace(s.article_id, &s);

  const CorpusLoadResult corpus = load_corpus(config.paths.corpus);
  std::map<std::string, const Article*> article_by_id;
  for (const auto& a : corpus.articles) article_by_id.emplace(a.id, &a);

  const DmaTable dma = load_dma_table(config.paths.dma);

  const ImpressionLoadResult loaded = load_impressions(config.paths.impressions);
  for (const auto& [line_no, reason] : loaded.skipped_lines) {
    log << "impressions line " << line_no << " skipped: " << reason << '\n';
  }

  std::vector<Impression> treatment;
  std::vector<Impression> baseline;
  treatment.reserve(loaded.impressions.size());
  baseline.reserve(loaded.impressions.size());
  for (const auto& imp : loaded.impressions) {
    auto s = stamp_by_id.find(imp.article_id);
    auto a = article_by_id.find(imp.article_id);
    if (s == stamp_by_id.end() || a == article_by_id.end()) {
      throw ValidationError("impression references unknown article \"" + imp.article_id + "\"");
    }
    Impression t = imp;
    t.stamped = s->second->geohashes;
    treatment.push_back(std::move(t));

    Impression b = imp;
    b.stamped = dma.stamp_for(a->second->publisher);
    baseline.push_back(std::move(b));
  }

  EvalReport report = evaluate(treatment, baseline, gaz);
  log << eval_report_table(report);
  return report;
}

void run_synth(std::uint64_t seed, const std::string& out_dir, std::ostream& log) {
  const SynthWorld world = generate_world(seed);
  write_world(world, out_dir);
  log << "synth seed " << seed << ": " << world.articles.size() << " articles, "
      << world.impressions.size() << " impressions, " << world.lt_records.size()
      << " gazetteer records (+" << world.bma_only_records.size() << " geocoder-only), "
      << world.local_publishers.size() << " local publishers -> " << out_dir << '\n';
}

std::size_t run_gazetteer_validate(const AppConfig& config, std::ostream& log) {
  const Gazetteer gaz = load_gazetteer(config.paths.gazetteer);
  std::size_t by_level[4] = {0, 0, 0, 0};
  for (const auto& rec : gaz.records()) ++by_level[static_cast<int>(rec.level)];
  log << "gazetteer ok: " << gaz.records().size() << " records (" << by_level[0] << " cities, "
      << by_level[1] << " counties, " << by_level[2] << " states, " << by_level[3]
      << " countries)\n";
  return gaz.records().size();
}

}  // namespace localnews
