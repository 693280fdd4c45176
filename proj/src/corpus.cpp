#include "localnews/corpus.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

namespace localnews {

namespace {

using nlohmann::json;

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

std::vector<std::string> split_words(const std::string& text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

std::int64_t parse_iso8601_utc(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  int consumed = 0;
  if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &y, &mo, &d, &h, &mi, &s,
                  &consumed) != 6) {
    throw ValidationError("unparseable timestamp \"" + text + "\"");
  }
  std::size_t rest = static_cast<std::size_t>(consumed);
  // Fractional seconds are accepted and truncated.
  if (rest < text.size() && text[rest] == '.') {
    ++rest;
    while (rest < text.size() && std::isdigit(static_cast<unsigned char>(text[rest]))) ++rest;
  }
  const std::string tz = text.substr(rest);
  if (tz != "Z" && tz != "+00:00" && tz != "+0000") {
    throw ValidationError("timestamp \"" + text + "\" must be UTC (Z)");
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
    throw ValidationError("timestamp \"" + text + "\" has out-of-range fields");
  }
  return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

std::string format_iso8601_utc(std::int64_t epoch_seconds) {
  std::int64_t days = epoch_seconds / 86400;
  std::int64_t rem = epoch_seconds % 86400;
  if (rem < 0) {
    rem += 86400;
    --days;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60),
                static_cast<int>(rem % 60));
  return buf;
}

std::string trim_words(const std::string& text, std::size_t count) {
  const auto words = split_words(text);
  if (words.size() <= 2 * count) {
    return join_words(words);
  }
  std::vector<std::string> kept(words.begin(), words.begin() + static_cast<long>(count));
  kept.insert(kept.end(), words.end() - static_cast<long>(count), words.end());
  return join_words(kept);
}

std::string build_geocode_query(const Article& article, std::size_t trim_count) {
  std::string query;
  for (const std::string* field : {&article.title, &article.snippet, &article.body}) {
    std::string part = trim_words(*field, trim_count);
    if (part.empty()) continue;
    if (!query.empty()) query += ' ';
    query += part;
  }
  return query;
}

std::string article_full_text(const Article& article) {
  std::string text = article.title;
  for (const std::string* field : {&article.snippet, &article.body}) {
    if (field->empty()) continue;
    if (!text.empty()) text += ' ';
    text += *field;
  }
  return text;
}

Article parse_article_json(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("bad JSON: ") + e.what());
  }
  if (!obj.is_object()) {
    throw ValidationError("corpus line is not a JSON object");
  }
  Article a;
  try {
    a.id = obj.at("id").get<std::string>();
    a.title = obj.value("title", std::string());
    a.snippet = obj.value("snippet", std::string());
    a.body = obj.value("body", std::string());
    a.url = obj.value("url", std::string());
    a.publisher = obj.at("publisher").get<std::string>();
    a.published_at = parse_iso8601_utc(obj.at("published_at").get<std::string>());
  } catch (const json::exception& e) {
    throw ValidationError(std::string("missing or mistyped field: ") + e.what());
  }
  if (a.id.empty()) throw ValidationError("article id is empty");
  if (a.publisher.empty()) throw ValidationError("article publisher is empty");
  return a;
}

std::string article_to_json(const Article& article) {
  json obj;
  obj["id"] = article.id;
  obj["title"] = article.title;
  obj["snippet"] = article.snippet;
  obj["body"] = article.body;
  obj["url"] = article.url;
  obj["publisher"] = article.publisher;
  obj["published_at"] = format_iso8601_utc(article.published_at);
  return obj.dump();
}

CorpusLoadResult load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open corpus file " + path);
  }
  CorpusLoadResult result;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++records;
    try {
      Article a = parse_article_json(line);
      if (!seen_ids.insert(a.id).second) {
        throw ValidationError("duplicate article id \"" + a.id + "\"");
      }
      result.articles.push_back(std::move(a));
    } catch (const ValidationError& e) {
      ++result.skipped;
      result.skipped_lines.emplace_back(line_no, e.what());
    }
  }
  if (records > 0 && result.skipped * 2 > records) {
    throw CorpusFormatError("corpus " + path + ": " + std::to_string(result.skipped) + " of " +
                            std::to_string(records) + " lines invalid");
  }
  return result;
}

}  // namespace localnews
