#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace localnews {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument or precondition violation (out-of-range coordinate,
/// malformed geohash, empty input where content is required, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A bounding-box cover would produce more cells than the configured cap.
class CoverageTooLargeError : public Error {
 public:
  CoverageTooLargeError(std::size_t cells, std::size_t cap)
      : Error("coverage too large: " + std::to_string(cells) +
              " cells exceed cap of " + std::to_string(cap)),
        cells_(cells),
        cap_(cap) {}

  std::size_t cells() const { return cells_; }
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cells_;
  std::size_t cap_;
};

/// File could not be opened or read.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Corpus file is structurally broken (more than half of the lines invalid).
class CorpusFormatError : public Error {
 public:
  using Error::Error;
};

/// Gazetteer file violates the record contract.
class GazetteerFormatError : public Error {
 public:
  using Error::Error;
};

/// Publisher affinity could not be built (too many per-article failures).
class AffinityBuildError : public Error {
 public:
  using Error::Error;
};

// Remote geocoder failures, one kind per failure mode so callers can
// distinguish retryable conditions from configuration problems.
class GeocoderError : public Error {
 public:
  using Error::Error;
};

class GeocoderTimeoutError : public GeocoderError {
 public:
  using GeocoderError::GeocoderError;
};

class GeocoderRateLimitError : public GeocoderError {
 public:
  using GeocoderError::GeocoderError;
};

class GeocoderAuthError : public GeocoderError {
 public:
  using GeocoderError::GeocoderError;
};

class GeocoderResponseError : public GeocoderError {
 public:
  using GeocoderError::GeocoderError;
};

}  // namespace localnews
