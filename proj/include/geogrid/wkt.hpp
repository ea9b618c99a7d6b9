#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "geogrid/cell.hpp"
#include "geogrid/sphere.hpp"

namespace geogrid {

/// How to serialize geometry that crosses the antimeridian or wraps a pole:
/// cut it into valid parts, fail, or fall back to a center point.
enum class AntimeridianPolicy { split, reject, point_abstract };

AntimeridianPolicy antimeridian_policy_from_string(std::string_view s);
const char* to_string(AntimeridianPolicy p);

/// Parsed WKT geometry. Coordinates are stored in (lat, lng) pairs; WKT
/// text order is `lng lat`. Polygon rings keep their explicit closing
/// vertex as written.
struct WktGeometry {
  enum class Kind {
    point,
    line_string,
    polygon,
    multi_point,
    multi_line_string,
    multi_polygon,
  };
  Kind kind = Kind::point;

  std::vector<LatLng> points;                              // (multi)point
  std::vector<std::vector<LatLng>> lines;                  // (multi)linestring
  std::vector<std::vector<std::vector<LatLng>>> polygons;  // part -> rings

  /// True if any ring or line triggers the antimeridian test.
  bool antimeridian_crossing = false;

  bool is_areal() const {
    return kind == Kind::polygon || kind == Kind::multi_polygon;
  }
};

const char* to_string(WktGeometry::Kind k);

/// Parse WKT text. Throws ParseError with a byte offset on syntax errors,
/// out-of-range coordinates, unclosed rings, and unsupported kinds.
WktGeometry parse_wkt(std::string_view text);

/// Serialize a parsed geometry back to WKT.
std::string to_wkt(const WktGeometry& geom);

/// Serialize a cell's corner quadrilateral as planar WKT under the given
/// policy. Splitting cuts at the +/-180 meridian (inserting the pole
/// parallel for pole-wrapping cells); reject throws; point_abstract emits
/// the cell center. Coordinates are written with 6 decimals.
std::string cell_to_wkt(CellId c, AntimeridianPolicy policy);

/// True iff some consecutive longitude gap is >= 180 degrees or a pole
/// lies inside the ring interpreted as a spherical loop.
bool detect_crossing(const std::vector<LatLng>& ring);

/// True if the cell's corner ring needs antimeridian handling.
bool cell_crosses_antimeridian(CellId c);

// --- conversion to spherical forms ------------------------------------------

/// Densified spherical polygons for an areal geometry.
MultiPolygon to_spherical(const WktGeometry& geom,
                          double max_step_deg = kDefaultDensifyStepDeg);

/// Densified chains for a lineal geometry.
std::vector<GeodesicChain> to_chains(const WktGeometry& geom,
                                     double max_step_deg = kDefaultDensifyStepDeg);

/// One record of a newline-delimited `id<TAB>WKT` file.
struct WktRecord {
  std::string id;
  WktGeometry geometry;
};

/// Parse `id<TAB>WKT` lines; blank lines and lines starting with '#' are
/// skipped. Throws ParseError with the 1-based line number on bad records.
std::vector<WktRecord> read_wkt_records(std::istream& in);

}  // namespace geogrid
