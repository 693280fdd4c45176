#pragma once

#include <compare>
#include <set>
#include <string>
#include <string_view>

#include "localnews/errors.hpp"

namespace localnews {

/// Mean earth radius in kilometers (IUGG R1), used for every km conversion.
inline constexpr double kEarthRadiusKm = 6371.0088;

/// Kilometers per degree of great-circle arc.
inline constexpr double kKmPerDegree = 2.0 * 3.14159265358979323846 * kEarthRadiusKm / 360.0;

/// A point on the earth in degrees. Construction validates the ranges
/// lat in [-90, 90], lon in [-180, 180]; both must be finite.
struct LatLon {
  double lat = 0.0;
  double lon = 0.0;

  LatLon() = default;
  LatLon(double lat_deg, double lon_deg);
};

/// Axis-aligned lat/lon rectangle. south <= north and west <= east are
/// enforced; boxes wrapping the antimeridian are rejected.
struct BoundingBox {
  double south = 0.0;
  double west = 0.0;
  double north = 0.0;
  double east = 0.0;

  BoundingBox() = default;
  BoundingBox(double south_deg, double west_deg, double north_deg, double east_deg);

  /// Closed containment: edges count as inside.
  bool contains(const LatLon& p) const;

  LatLon center() const;
};

/// Base-32 geohash cell identifier, 1 to 12 characters over the alphabet
/// "0123456789bcdefghjkmnpqrstuvwxyz". Two geohashes name the same cell
/// iff their text is equal.
class Geohash {
 public:
  static constexpr int kMinLength = 1;
  static constexpr int kMaxLength = 12;
  static constexpr std::string_view kAlphabet = "0123456789bcdefghjkmnpqrstuvwxyz";

  explicit Geohash(std::string text);

  const std::string& text() const { return text_; }
  int length() const { return static_cast<int>(text_.size()); }

  /// First n characters as a geohash (n in [1, length]).
  Geohash prefix(int n) const;

  auto operator<=>(const Geohash&) const = default;

 private:
  std::string text_;
};

/// Encodes a point into the unique geohash of the given length whose cell
/// contains it. Points on an interior cell edge go to the cell for which
/// the edge is the south/west boundary; lat 90 and lon 180 go to the
/// topmost cell.
Geohash encode(const LatLon& point, int length);

/// Exact cell rectangle of a geohash.
BoundingBox decode_bbox(const Geohash& gh);

/// Cell width/height in degrees for a geohash of the given length.
double cell_width_deg(int length);
double cell_height_deg(int length);

/// All geohashes of the given length whose cells overlap the box with
/// positive area, so a box equal to a cell yields exactly that cell's
/// descendants. Degenerate boxes (points, lines) keep every cell whose
/// closed rectangle contains them. length must be in [1, 8]. Throws
/// CoverageTooLargeError when the result would exceed max_cells.
std::set<Geohash> cover(const BoundingBox& box, int length, std::size_t max_cells = 4096);

/// True iff the first n characters of a and b are identical.
/// n must not exceed either length.
bool shares_prefix(const Geohash& a, const Geohash& b, int n);

}  // namespace localnews
