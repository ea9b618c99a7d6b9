#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geogrid/cell.hpp"
#include "geogrid/coverer.hpp"
#include "geogrid/enrich.hpp"
#include "geogrid/error.hpp"

namespace geogrid {

/// Whether a quantity sums meaningfully over spatial parts (areas do) or
/// not (indexes and other measurements).
enum class QuantityKind { mereotopological, arithmetic };

const char* to_string(QuantityKind k);
QuantityKind quantity_kind_from_string(std::string_view s);

/// A temporally scoped value observed for one grid cell.
struct Observation {
  std::string id;
  CellId cell;  // feature of interest
  std::string property;
  double value = 0;
  std::string unit;
  std::string phenomenon_time;  // ISO-8601 date or year
  QuantityKind kind = QuantityKind::mereotopological;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct PropertyInfo {
  QuantityKind kind = QuantityKind::mereotopological;
  std::string unit;
};

/// Declares each property's quantity kind and unit; the distinction cannot
/// be inferred from values.
class PropertyManifest {
 public:
  /// TSV rows: property<TAB>kind<TAB>unit
  static PropertyManifest from_tsv(std::istream& in);

  void add(const std::string& property, QuantityKind kind, std::string unit);
  const PropertyInfo* find(const std::string& property) const;
  /// Lookup that falls back to the base name before a '/' category suffix.
  PropertyInfo require(const std::string& property) const;

 private:
  std::map<std::string, PropertyInfo> props_;
};

/// Geographic lon/lat raster, row-major with the first row northmost.
struct RasterGrid {
  size_t nrows = 0, ncols = 0;
  double xll = 0, yll = 0;  // lower-left corner, degrees
  double cell_size = 0;     // degrees per pixel
  double nodata = -9999;
  std::string crs = "EPSG:4326";
  std::vector<double> values;

  double at(size_t row, size_t col) const { return values[row * ncols + col]; }
  LatLng pixel_center(size_t row, size_t col) const;

  /// Parse an ESRI ASCII grid. `crs` comes from the JSON sidecar; anything
  /// non-geographic is rejected.
  static RasterGrid read_ascii_grid(std::istream& in, std::string crs);
};

bool crs_is_geographic(std::string_view crs);

/// The raster's spatial bounds as a spherical polygon.
SphericalPolygon raster_footprint(const RasterGrid& r,
                                  double max_step_deg = kDefaultDensifyStepDeg);

/// Overlap-area observations for an areal feature: one observation per
/// reference cell with positive overlap, valued in km^2.
std::vector<Observation> discretize_vector(
    const Feature& f, const ReferenceGrid& grid, const std::string& property,
    const PropertyManifest& manifest, const std::string& phenomenon_time,
    double densify_step_deg = kDefaultDensifyStepDeg);

enum class RasterStat { percent_by_category, mean, sum };

RasterStat raster_stat_from_string(std::string_view s);

/// Aggregate raster pixels into reference cells; pixel membership is by
/// pixel center. percent_by_category emits one observation per category
/// present in a cell (property suffixed `/{category}`); nodata pixels are
/// excluded from denominators.
std::vector<Observation> discretize_raster(const RasterGrid& r,
                                           const ReferenceGrid& grid,
                                           RasterStat stat,
                                           const std::string& property,
                                           const PropertyManifest& manifest,
                                           const std::string& phenomenon_time);

/// Thrown when a roll-up would sum or average a quantity that does not
/// aggregate over space.
class ArithmeticAggregationError : public Error {
 public:
  using Error::Error;
};

/// Sum observations up the hierarchy: group by (ancestor at to_level,
/// property, time) and add values. All inputs must share one level above
/// to_level and be mereotopological.
std::vector<Observation> roll_up(const std::vector<Observation>& obs,
                                 int to_level);

/// Weighted mean over the observations whose cell lies in the region.
double weighted_aggregate(const std::vector<Observation>& obs,
                          const Covering& region,
                          const std::function<double(CellId)>& weight);

}  // namespace geogrid
