#include "localnews/geohash.hpp"

#include <cmath>
#include <cstdint>

namespace localnews {

namespace {

constexpr int kBitsPerChar = 5;

int alphabet_index(char c) {
  auto pos = Geohash::kAlphabet.find(c);
  return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

int lon_bits_for(int length) { return (kBitsPerChar * length + 1) / 2; }
int lat_bits_for(int length) { return kBitsPerChar * length / 2; }

void require_length(int length, int lo, int hi, const char* what) {
  if (length < lo || length > hi) {
    throw ValidationError(std::string(what) + " length " + std::to_string(length) +
                          " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

// Builds the geohash string for the cell at (lat_idx, lon_idx) on the
// length-L grid. Bit 0 of the stream is the longitude MSB.
Geohash cell_to_geohash(std::uint64_t lat_idx, std::uint64_t lon_idx, int length) {
  const int lon_bits = lon_bits_for(length);
  const int lat_bits = lat_bits_for(length);
  std::string text(static_cast<std::size_t>(length), '0');
  int lon_taken = 0;
  int lat_taken = 0;
  for (int c = 0; c < length; ++c) {
    int value = 0;
    for (int b = 0; b < kBitsPerChar; ++b) {
      const int stream_pos = c * kBitsPerChar + b;
      int bit;
      if (stream_pos % 2 == 0) {
        bit = static_cast<int>((lon_idx >> (lon_bits - 1 - lon_taken)) & 1u);
        ++lon_taken;
      } else {
        bit = static_cast<int>((lat_idx >> (lat_bits - 1 - lat_taken)) & 1u);
        ++lat_taken;
      }
      value = (value << 1) | bit;
    }
    text[static_cast<std::size_t>(c)] = Geohash::kAlphabet[static_cast<std::size_t>(value)];
  }
  return Geohash(std::move(text));
}

// Index range of the cells a box span [lo_v, hi_v] covers along one axis.
// Non-degenerate spans use positive-measure overlap, so a span that only
// touches a grid line does not pull in the cell on the far side; a
// degenerate span (a point or a line box) keeps every cell whose closed
// range contains it.
std::pair<std::uint64_t, std::uint64_t> axis_range(double lo_v, double hi_v, double lo,
                                                   double step, std::uint64_t cells) {
  const double lo_pos = (lo_v - lo) / step;
  const double hi_pos = (hi_v - lo) / step;
  const auto clamp = [cells](double idx) {
    if (idx < 0) return std::uint64_t{0};
    if (idx >= static_cast<double>(cells)) return cells - 1;
    return static_cast<std::uint64_t>(idx);
  };
  if (lo_v == hi_v) {
    std::uint64_t first = clamp(std::floor(lo_pos));
    std::uint64_t last = first;
    if (lo_pos == std::floor(lo_pos) && lo_pos > 0 && lo_pos < static_cast<double>(cells)) {
      first = clamp(lo_pos - 1);  // a value on a grid line belongs to both cells
    }
    return {first, last};
  }
  const std::uint64_t first = clamp(std::floor(lo_pos));
  std::uint64_t last;
  if (hi_pos == std::floor(hi_pos)) {
    last = clamp(hi_pos - 1);  // zero-width overlap with the cell starting here
  } else {
    last = clamp(std::floor(hi_pos));
  }
  if (last < first) last = first;
  return {first, last};
}

}  // namespace

LatLon::LatLon(double lat_deg, double lon_deg) : lat(lat_deg), lon(lon_deg) {
  if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
    throw ValidationError("latitude " + std::to_string(lat_deg) + " outside [-90, 90]");
  }
  if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0) {
    throw ValidationError("longitude " + std::to_string(lon_deg) + " outside [-180, 180]");
  }
}

BoundingBox::BoundingBox(double south_deg, double west_deg, double north_deg, double east_deg)
    : south(south_deg), west(west_deg), north(north_deg), east(east_deg) {
  LatLon sw(south, west);  // range-checks all four corners
  LatLon ne(north, east);
  if (south > north) {
    throw ValidationError("bounding box south > north");
  }
  if (west > east) {
    throw ValidationError("bounding box west > east (antimeridian boxes unsupported)");
  }
}

bool BoundingBox::contains(const LatLon& p) const {
  return p.lat >= south && p.lat <= north && p.lon >= west && p.lon <= east;
}

LatLon BoundingBox::center() const {
  return LatLon((south + north) / 2.0, (west + east) / 2.0);
}

Geohash::Geohash(std::string text) : text_(std::move(text)) {
  require_length(static_cast<int>(text_.size()), kMinLength, kMaxLength, "geohash");
  for (char c : text_) {
    if (alphabet_index(c) < 0) {
      throw ValidationError("invalid geohash character '" + std::string(1, c) + "' in \"" + text_ + "\"");
    }
  }
}

Geohash Geohash::prefix(int n) const {
  if (n < 1 || n > length()) {
    throw ValidationError("prefix length " + std::to_string(n) + " outside [1, " +
                          std::to_string(length()) + "]");
  }
  return Geohash(text_.substr(0, static_cast<std::size_t>(n)));
}

Geohash encode(const LatLon& point, int length) {
  require_length(length, Geohash::kMinLength, Geohash::kMaxLength, "encode");
  LatLon checked(point.lat, point.lon);  // re-validate aggregate-initialized inputs

  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;
  std::string text(static_cast<std::size_t>(length), '0');
  bool use_lon = true;
  for (int c = 0; c < length; ++c) {
    int value = 0;
    for (int b = 0; b < kBitsPerChar; ++b) {
      if (use_lon) {
        const double mid = (lon_lo + lon_hi) / 2.0;
        if (checked.lon >= mid) {
          value = (value << 1) | 1;
          lon_lo = mid;
        } else {
          value <<= 1;
          lon_hi = mid;
        }
      } else {
        const double mid = (lat_lo + lat_hi) / 2.0;
        if (checked.lat >= mid) {
          value = (value << 1) | 1;
          lat_lo = mid;
        } else {
          value <<= 1;
          lat_hi = mid;
        }
      }
      use_lon = !use_lon;
    }
    text[static_cast<std::size_t>(c)] = Geohash::kAlphabet[static_cast<std::size_t>(value)];
  }
  return Geohash(std::move(text));
}

BoundingBox decode_bbox(const Geohash& gh) {
  double lat_lo = -90.0, lat_hi = 90.0;
  double lon_lo = -180.0, lon_hi = 180.0;
  bool use_lon = true;
  for (char c : gh.text()) {
    const int value = alphabet_index(c);
    for (int b = kBitsPerChar - 1; b >= 0; --b) {
      const int bit = (value >> b) & 1;
      if (use_lon) {
        const double mid = (lon_lo + lon_hi) / 2.0;
        (bit ? lon_lo : lon_hi) = mid;
      } else {
        const double mid = (lat_lo + lat_hi) / 2.0;
        (bit ? lat_lo : lat_hi) = mid;
      }
      use_lon = !use_lon;
    }
  }
  return BoundingBox(lat_lo, lon_lo, lat_hi, lon_hi);
}

double cell_width_deg(int length) {
  require_length(length, Geohash::kMinLength, Geohash::kMaxLength, "cell width");
  return 360.0 / static_cast<double>(std::uint64_t{1} << lon_bits_for(length));
}

double cell_height_deg(int length) {
  require_length(length, Geohash::kMinLength, Geohash::kMaxLength, "cell height");
  return 180.0 / static_cast<double>(std::uint64_t{1} << lat_bits_for(length));
}

std::set<Geohash> cover(const BoundingBox& box, int length, std::size_t max_cells) {
  require_length(length, 1, 8, "cover");

  const double dlon = cell_width_deg(length);
  const double dlat = cell_height_deg(length);
  const std::uint64_t lon_cells = std::uint64_t{1} << lon_bits_for(length);
  const std::uint64_t lat_cells = std::uint64_t{1} << lat_bits_for(length);

  const auto [j0, j1] = axis_range(box.west, box.east, -180.0, dlon, lon_cells);
  const auto [i0, i1] = axis_range(box.south, box.north, -90.0, dlat, lat_cells);

  const std::uint64_t count = (j1 - j0 + 1) * (i1 - i0 + 1);
  if (count > max_cells) {
    throw CoverageTooLargeError(static_cast<std::size_t>(count), max_cells);
  }

  std::set<Geohash> cells;
  for (std::uint64_t i = i0; i <= i1; ++i) {
    for (std::uint64_t j = j0; j <= j1; ++j) {
      cells.insert(cell_to_geohash(i, j, length));
    }
  }
  return cells;
}

bool shares_prefix(const Geohash& a, const Geohash& b, int n) {
  if (n < 0) {
    throw ValidationError("prefix length must be non-negative");
  }
  if (n > a.length() || n > b.length()) {
    throw ValidationError("prefix length " + std::to_string(n) + " exceeds geohash length");
  }
  return a.text().compare(0, static_cast<std::size_t>(n), b.text(), 0,
                          static_cast<std::size_t>(n)) == 0;
}

}  // namespace localnews
