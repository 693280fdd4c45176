#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "localnews/config.hpp"
#include "localnews/metrics.hpp"
#include "localnews/pipeline.hpp"

namespace localnews {

/// Stamps the corpus at config.paths.corpus and writes one StampResult
/// per line to config.paths.stamps. Returns the run summary.
StampRun run_stamp(const AppConfig& config, std::ostream& log);

struct AffinityRunSummary {
  std::size_t publishers_seen = 0;
  std::size_t entries_written = 0;
  std::size_t below_min_articles = 0;
};

/// Builds affinity entries for the publishers listed in publishers_path
/// (one id per line; empty optional means every publisher in the corpus)
/// and writes them to config.paths.affinity.
AffinityRunSummary run_affinity(const AppConfig& config,
                                const std::optional<std::string>& publishers_path,
                                std::ostream& log);

/// Replays config.paths.impressions against the ensemble stamps
/// (treatment) and the DMA baseline, and returns the paired report.
EvalReport run_eval(const AppConfig& config, std::ostream& log);

/// Generates the synthetic benchmark into out_dir.
void run_synth(std::uint64_t seed, const std::string& out_dir, std::ostream& log);

/// Validates the gazetteer file; returns the number of records.
std::size_t run_gazetteer_validate(const AppConfig& config, std::ostream& log);

}  // namespace localnews
