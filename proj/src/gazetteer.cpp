#include "localnews/gazetteer.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace localnews {

namespace {

bool is_word_char(unsigned char c) {
  // Bytes >= 0x80 keep multi-byte UTF-8 sequences inside one token.
  return std::isalnum(c) || c >= 0x80;
}

char ascii_lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

std::vector<std::string> tokenize_lower(const std::string& text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !is_word_char(static_cast<unsigned char>(text[i]))) ++i;
    std::string tok;
    while (i < text.size() && is_word_char(static_cast<unsigned char>(text[i]))) {
      tok += ascii_lower(static_cast<unsigned char>(text[i]));
      ++i;
    }
    if (!tok.empty()) tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t begin,
                        std::size_t count) {
  std::string out;
  for (std::size_t i = begin; i < begin + count; ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(text);
  while (std::getline(in, part, sep)) parts.push_back(part);
  if (!text.empty() && text.back() == sep) parts.push_back("");
  return parts;
}

double parse_double(const std::string& text, const char* what, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw GazetteerFormatError("line " + std::to_string(line_no) + ": bad " + what + " \"" +
                               text + "\"");
  }
}

}  // namespace

std::string to_string(AdminLevel level) {
  switch (level) {
    case AdminLevel::City: return "city";
    case AdminLevel::CountyOrDistrict: return "county_or_district";
    case AdminLevel::State: return "state";
    case AdminLevel::Country: return "country";
  }
  return "city";
}

AdminLevel admin_level_from_string(const std::string& text) {
  if (text == "city") return AdminLevel::City;
  if (text == "county_or_district") return AdminLevel::CountyOrDistrict;
  if (text == "state") return AdminLevel::State;
  if (text == "country") return AdminLevel::Country;
  throw ValidationError("unknown admin level \"" + text + "\"");
}

int geochain_length(AdminLevel level) {
  switch (level) {
    case AdminLevel::City: return 4;
    case AdminLevel::CountyOrDistrict: return 3;
    case AdminLevel::State: return 2;
    case AdminLevel::Country: return 1;
  }
  return 4;
}

std::optional<std::string> LocationRecord::county() const {
  // Geochain entries are positioned by distance from the country end:
  // country is last, state second-to-last, county third-to-last.
  if (geochain.size() >= 3) return geochain[geochain.size() - 3];
  return std::nullopt;
}

std::optional<std::string> LocationRecord::state() const {
  if (geochain.size() >= 2) return geochain[geochain.size() - 2];
  return std::nullopt;
}

std::string normalize_alias(const std::string& text) {
  const auto tokens = tokenize_lower(text);
  return join_tokens(tokens, 0, tokens.size());
}

Gazetteer::Gazetteer(std::vector<LocationRecord> records) : records_(std::move(records)) {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& rec = records_[i];
    id_index_.emplace(rec.loc_id, i);
    for (const auto& alias : rec.aliases) {
      const std::string norm = normalize_alias(alias);
      if (norm.empty()) continue;
      auto& bucket = alias_index_[norm];
      if (std::find(bucket.begin(), bucket.end(), i) == bucket.end()) bucket.push_back(i);
      const std::size_t tokens = static_cast<std::size_t>(
          std::count(norm.begin(), norm.end(), ' ')) + 1;
      max_alias_tokens_ = std::max(max_alias_tokens_, tokens);
    }
  }
}

const LocationRecord* Gazetteer::by_loc_id(const std::string& loc_id) const {
  auto it = id_index_.find(loc_id);
  return it == id_index_.end() ? nullptr : &records_[it->second];
}

std::vector<AliasMatch> Gazetteer::find_matches(const std::string& text) const {
  const auto tokens = tokenize_lower(text);
  std::vector<AliasMatch> candidates;
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    const std::size_t max_len = std::min(max_alias_tokens_, tokens.size() - start);
    for (std::size_t len = 1; len <= max_len; ++len) {
      const std::string key = join_tokens(tokens, start, len);
      auto it = alias_index_.find(key);
      if (it == alias_index_.end()) continue;
      for (std::size_t rec_idx : it->second) {
        candidates.push_back(AliasMatch{rec_idx, key, start, len});
      }
    }
  }

  // Longest span first; a candidate survives unless a strictly longer kept
  // match overlaps its tokens.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const AliasMatch& a, const AliasMatch& b) {
                     if (a.token_count != b.token_count) return a.token_count > b.token_count;
                     if (a.token_begin != b.token_begin) return a.token_begin < b.token_begin;
                     return a.record_index < b.record_index;
                   });
  std::vector<AliasMatch> kept;
  for (const auto& cand : candidates) {
    bool suppressed = false;
    for (const auto& k : kept) {
      const bool overlaps = cand.token_begin < k.token_begin + k.token_count &&
                            k.token_begin < cand.token_begin + cand.token_count;
      if (overlaps && k.token_count > cand.token_count) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(cand);
  }
  return kept;
}

std::vector<const LocationRecord*> lt_lookup(const std::string& text, const Gazetteer& gaz) {
  std::vector<const LocationRecord*> out;
  std::set<std::size_t> seen;
  for (const auto& m : gaz.find_matches(text)) {
    if (seen.insert(m.record_index).second) {
      out.push_back(&gaz.records()[m.record_index]);
    }
  }
  std::sort(out.begin(), out.end(), [](const LocationRecord* a, const LocationRecord* b) {
    return a->loc_id < b->loc_id;
  });
  return out;
}

std::set<Geohash> location_geohashes(const LocationRecord& rec, int length,
                                     std::size_t max_cells) {
  return cover(rec.bbox, length, max_cells);
}

Gazetteer load_gazetteer(const std::string& path,
                         const std::set<std::string>& short_alias_whitelist) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open gazetteer file " + path);
  }
  std::vector<LocationRecord> records;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cols = split(line, '\t');
    if (cols.size() != 11) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": expected 11 columns, got " +
                                 std::to_string(cols.size()));
    }
    LocationRecord rec;
    rec.loc_id = cols[0];
    rec.name = cols[1];
    rec.aliases = split(cols[2], '|');
    try {
      rec.level = admin_level_from_string(cols[3]);
    } catch (const ValidationError& e) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }
    rec.geochain = split(cols[4], '>');
    const double south = parse_double(cols[5], "south", line_no);
    const double west = parse_double(cols[6], "west", line_no);
    const double north = parse_double(cols[7], "north", line_no);
    const double east = parse_double(cols[8], "east", line_no);
    const double lat = parse_double(cols[9], "lat", line_no);
    const double lon = parse_double(cols[10], "lon", line_no);
    try {
      rec.bbox = BoundingBox(south, west, north, east);
      rec.point = LatLon(lat, lon);
    } catch (const ValidationError& e) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": " + e.what());
    }

    if (rec.loc_id.empty() || rec.name.empty()) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": empty loc_id or name");
    }
    if (!ids.insert(rec.loc_id).second) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": duplicate loc_id \"" +
                                 rec.loc_id + "\"");
    }
    if (!rec.bbox.contains(rec.point)) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": point outside bbox for \"" +
                                 rec.loc_id + "\"");
    }
    if (static_cast<int>(rec.geochain.size()) != geochain_length(rec.level)) {
      throw GazetteerFormatError("line " + std::to_string(line_no) + ": geochain length " +
                                 std::to_string(rec.geochain.size()) + " does not match level " +
                                 to_string(rec.level));
    }
    // Canonical name always matches itself.
    if (std::find(rec.aliases.begin(), rec.aliases.end(), rec.name) == rec.aliases.end()) {
      rec.aliases.push_back(rec.name);
    }
    for (const auto& alias : rec.aliases) {
      const std::string norm = normalize_alias(alias);
      if (norm.size() < 3 && !short_alias_whitelist.count(norm)) {
        throw GazetteerFormatError("line " + std::to_string(line_no) + ": alias \"" + alias +
                                   "\" shorter than 3 characters (not whitelisted)");
      }
    }
    records.push_back(std::move(rec));
  }
  return Gazetteer(std::move(records));
}

void write_gazetteer(const std::string& path, const std::vector<LocationRecord>& records) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write gazetteer file " + path);
  }
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& rec : records) {
    std::string aliases;
    for (const auto& a : rec.aliases) {
      if (!aliases.empty()) aliases += '|';
      aliases += a;
    }
    std::string chain;
    for (const auto& g : rec.geochain) {
      if (!chain.empty()) chain += '>';
      chain += g;
    }
    out << rec.loc_id << '\t' << rec.name << '\t' << aliases << '\t' << to_string(rec.level)
        << '\t' << chain << '\t' << fmt(rec.bbox.south) << '\t' << fmt(rec.bbox.west) << '\t'
        << fmt(rec.bbox.north) << '\t' << fmt(rec.bbox.east) << '\t' << fmt(rec.point.lat)
        << '\t' << fmt(rec.point.lon) << '\n';
  }
}

}  // namespace localnews
