#include "localnews/stamper.hpp"

namespace localnews {

namespace {

constexpr int kCellLength = 4;

void require_cell(const Geohash& gh) {
  if (gh.length() != kCellLength) {
    throw ValidationError("candidate geohash \"" + gh.text() + "\" must have length " +
                          std::to_string(kCellLength));
  }
}

bool any_pair_shares_prefix(const std::set<Geohash>& a, const std::set<Geohash>& b,
                            int prefix_len) {
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (shares_prefix(x, y, prefix_len)) return true;
    }
  }
  return false;
}

}  // namespace

std::string to_string(Source s) {
  switch (s) {
    case Source::Pub: return "PUB";
    case Source::Lt: return "LT";
    case Source::Bma: return "BMA";
  }
  return "PUB";
}

Source source_from_string(const std::string& text) {
  if (text == "PUB") return Source::Pub;
  if (text == "LT") return Source::Lt;
  if (text == "BMA") return Source::Bma;
  throw ValidationError("unknown stamp source \"" + text + "\"");
}

StampResult stamp(const std::string& article_id, const CandidateSets& cands, int prefix_len) {
  if (prefix_len < 1 || prefix_len > kCellLength) {
    throw ValidationError("prefix_len " + std::to_string(prefix_len) + " outside [1, 4]");
  }
  std::set<Geohash> lt_cells;
  for (const auto& [gh, locs] : cands.lt) {
    require_cell(gh);
    lt_cells.insert(gh);
  }
  std::set<Geohash> bma_all;
  std::set<Geohash> bma_high_medium;
  std::set<Geohash> bma_high;
  for (const auto& [gh, conf] : cands.bma) {
    require_cell(gh);
    bma_all.insert(gh);
    if (conf >= Confidence::Medium) bma_high_medium.insert(gh);
    if (conf == Confidence::High) bma_high.insert(gh);
  }
  // An empty affinity set carries no information; treat it as absent.
  std::optional<std::set<Geohash>> pub;
  if (cands.pub && !cands.pub->empty()) {
    for (const auto& gh : *cands.pub) require_cell(gh);
    pub = *cands.pub;
  }

  StampResult result;
  result.article_id = article_id;

  auto stamp_set = [&result](int rule, const std::set<Geohash>& cells, Source source) {
    if (cells.empty()) return;
    result.rules_fired.insert(rule);
    for (const auto& gh : cells) {
      result.geohashes.insert(gh);
      result.provenance[gh].insert(source);
    }
  };

  if (pub) {
    stamp_set(1, *pub, Source::Pub);
    if (any_pair_shares_prefix(lt_cells, *pub, prefix_len)) {
      stamp_set(2, lt_cells, Source::Lt);
    }
    if (any_pair_shares_prefix(bma_high_medium, *pub, prefix_len)) {
      stamp_set(3, bma_high_medium, Source::Bma);
    }
  } else {
    if (any_pair_shares_prefix(lt_cells, bma_all, prefix_len)) {
      stamp_set(4, lt_cells, Source::Lt);
      stamp_set(4, bma_all, Source::Bma);
    }
    if (lt_cells.empty()) {
      stamp_set(5, bma_high, Source::Bma);
    }
  }

  if (result.geohashes.empty()) {
    result.rules_fired = {6};
    result.provenance.clear();
  }
  return result;
}

}  // namespace localnews
