#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "localnews/errors.hpp"

namespace localnews {

/// One news article as ingested. published_at is UTC epoch seconds.
struct Article {
  std::string id;
  std::string title;
  std::string snippet;
  std::string body;
  std::string url;
  std::string publisher;
  std::int64_t published_at = 0;
};

/// Parses a UTC ISO-8601 timestamp ("2024-03-01T12:00:00Z", optional
/// fractional seconds, "+00:00" accepted) into epoch seconds.
std::int64_t parse_iso8601_utc(const std::string& text);

/// Epoch seconds back to "YYYY-MM-DDTHH:MM:SSZ".
std::string format_iso8601_utc(std::int64_t epoch_seconds);

/// First `count` plus last `count` whitespace-separated words of the text,
/// original order, single-space joined. Text with at most 2*count words
/// passes through (modulo whitespace normalization).
std::string trim_words(const std::string& text, std::size_t count = 10);

/// Geocoder query for an article: trimmed title, snippet and body joined
/// by single spaces. The URL is never part of the query.
std::string build_geocode_query(const Article& article, std::size_t trim_count = 10);

/// Title, snippet and body joined by single spaces, untrimmed. Input text
/// for the gazetteer scan.
std::string article_full_text(const Article& article);

struct CorpusLoadResult {
  std::vector<Article> articles;
  std::size_t skipped = 0;
  /// (1-based line number, reason) for every skipped line.
  std::vector<std::pair<std::size_t, std::string>> skipped_lines;
};

/// Reads a line-delimited JSON corpus. Invalid lines are skipped and
/// reported; more than 50% invalid lines is a CorpusFormatError.
CorpusLoadResult load_corpus(const std::string& path);

/// Parses one corpus JSON object. Throws ValidationError on bad records.
Article parse_article_json(const std::string& line);

/// Serializes an article to its corpus JSON line (no trailing newline).
std::string article_to_json(const Article& article);

}  // namespace localnews
