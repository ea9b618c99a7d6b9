#include "geogrid/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "geogrid/sphere.hpp"
#include "geogrid/wkt.hpp"

namespace geogrid {

const char* to_string(QuantityKind k) {
  return k == QuantityKind::mereotopological ? "mereotopological" : "arithmetic";
}

QuantityKind quantity_kind_from_string(std::string_view s) {
  if (s == "mereotopological") return QuantityKind::mereotopological;
  if (s == "arithmetic") return QuantityKind::arithmetic;
  throw Error("unknown quantity kind: " + std::string(s));
}

PropertyManifest PropertyManifest::from_tsv(std::istream& in) {
  PropertyManifest m;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string property, kind, unit;
    if (!std::getline(row, property, '\t') || !std::getline(row, kind, '\t') ||
        !std::getline(row, unit)) {
      throw ParseError("manifest row needs property<TAB>kind<TAB>unit",
                       line_no);
    }
    m.add(property, quantity_kind_from_string(kind), unit);
  }
  return m;
}

void PropertyManifest::add(const std::string& property, QuantityKind kind,
                           std::string unit) {
  props_[property] = PropertyInfo{kind, std::move(unit)};
}

const PropertyInfo* PropertyManifest::find(const std::string& property) const {
  auto it = props_.find(property);
  return it == props_.end() ? nullptr : &it->second;
}

PropertyInfo PropertyManifest::require(const std::string& property) const {
  if (const PropertyInfo* info = find(property)) return *info;
  size_t slash = property.rfind('/');
  if (slash != std::string::npos) {
    if (const PropertyInfo* info = find(property.substr(0, slash))) {
      return *info;
    }
  }
  throw Error("property not in manifest: " + property);
}

LatLng RasterGrid::pixel_center(size_t row, size_t col) const {
  double lng = xll + (static_cast<double>(col) + 0.5) * cell_size;
  double lat = yll + (static_cast<double>(nrows - 1 - row) + 0.5) * cell_size;
  return LatLng(lat, lng);
}

bool crs_is_geographic(std::string_view crs) {
  std::string up(crs);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return up == "EPSG:4326" || up == "OGC:CRS84" || up == "CRS84" ||
         up == "WGS84" || up == "GEOGRAPHIC";
}

RasterGrid RasterGrid::read_ascii_grid(std::istream& in, std::string crs) {
  if (!crs_is_geographic(crs)) {
    throw Error("raster CRS is not geographic lon/lat: " + crs);
  }
  RasterGrid g;
  g.crs = std::move(crs);
  bool have_rows = false, have_cols = false, have_x = false, have_y = false,
       have_size = false;
  std::string key;
  while (in >> key) {
    std::string low = key;
    std::transform(low.begin(), low.end(), low.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (low == "ncols") {
      in >> g.ncols;
      have_cols = true;
    } else if (low == "nrows") {
      in >> g.nrows;
      have_rows = true;
    } else if (low == "xllcorner") {
      in >> g.xll;
      have_x = true;
    } else if (low == "yllcorner") {
      in >> g.yll;
      have_y = true;
    } else if (low == "cellsize") {
      in >> g.cell_size;
      have_size = true;
    } else if (low == "nodata_value") {
      in >> g.nodata;
    } else {
      // First value token: headers are done.
      g.values.push_back(std::stod(key));
      break;
    }
  }
  if (!have_rows || !have_cols || !have_x || !have_y || !have_size) {
    throw Error("incomplete ascii grid header");
  }
  if (g.cell_size <= 0) throw Error("cellsize must be positive");
  double v;
  while (in >> v) g.values.push_back(v);
  if (g.values.size() != g.nrows * g.ncols) {
    throw Error("expected " + std::to_string(g.nrows * g.ncols) +
                " values, got " + std::to_string(g.values.size()));
  }
  return g;
}

SphericalPolygon raster_footprint(const RasterGrid& r, double max_step_deg) {
  double x0 = r.xll, x1 = r.xll + r.cell_size * static_cast<double>(r.ncols);
  double y0 = r.yll, y1 = r.yll + r.cell_size * static_cast<double>(r.nrows);
  std::vector<LatLng> ring = {LatLng(y0, x0), LatLng(y0, x1), LatLng(y1, x1),
                              LatLng(y1, x0), LatLng(y0, x0)};
  return SphericalPolygon({densify_ring(ring, max_step_deg)});
}

std::vector<Observation> discretize_vector(const Feature& f,
                                           const ReferenceGrid& grid,
                                           const std::string& property,
                                           const PropertyManifest& manifest,
                                           const std::string& phenomenon_time,
                                           double densify_step_deg) {
  if (f.kind != 'A') throw Error("vector discretization needs an areal feature");
  PropertyInfo info = manifest.require(property);
  MultiPolygon poly = to_spherical(f.geometry, densify_step_deg);
  Region region(poly);
  std::vector<Observation> out;
  HomogeneousStream stream(region, grid.level);
  while (auto cid = stream.next()) {
    CellId c = *cid;
    // Disconnected pieces inside one cell sum to a single observation.
    double fraction = overlap_fraction(poly, c);
    if (fraction <= 0) continue;
    Observation o;
    o.id = f.id + "." + c.token();
    o.cell = c;
    o.property = property;
    o.value = fraction * c.area_km2();
    o.unit = info.unit.empty() ? "km2" : info.unit;
    o.phenomenon_time = phenomenon_time;
    o.kind = info.kind;
    out.push_back(std::move(o));
  }
  return out;
}

RasterStat raster_stat_from_string(std::string_view s) {
  if (s == "percent" || s == "percent-by-category") {
    return RasterStat::percent_by_category;
  }
  if (s == "mean") return RasterStat::mean;
  if (s == "sum") return RasterStat::sum;
  throw Error("unknown raster statistic: " + std::string(s));
}

std::vector<Observation> discretize_raster(const RasterGrid& r,
                                           const ReferenceGrid& grid,
                                           RasterStat stat,
                                           const std::string& property,
                                           const PropertyManifest& manifest,
                                           const std::string& phenomenon_time) {
  if (!crs_is_geographic(r.crs)) {
    throw Error("raster CRS is not geographic lon/lat: " + r.crs);
  }
  if (r.nrows == 0 || r.ncols == 0) throw Error("empty raster");

  struct CellAccum {
    std::map<long long, size_t> categories;
    double sum = 0;
    size_t valid = 0;
  };
  std::map<CellId, CellAccum> accum;
  for (size_t row = 0; row < r.nrows; ++row) {
    for (size_t col = 0; col < r.ncols; ++col) {
      double v = r.at(row, col);
      if (v == r.nodata) continue;
      CellId c = CellId::from_latlng(r.pixel_center(row, col), grid.level);
      CellAccum& a = accum[c];
      a.valid++;
      a.sum += v;
      if (stat == RasterStat::percent_by_category) {
        a.categories[std::llround(v)]++;
      }
    }
  }
  if (accum.empty()) throw Error("raster has no valid pixels");

  std::vector<Observation> out;
  for (const auto& [cell, a] : accum) {
    switch (stat) {
      case RasterStat::percent_by_category:
        for (const auto& [cat, count] : a.categories) {
          Observation o;
          o.property = property + "/" + std::to_string(cat);
          o.id = o.property + "." + cell.token() + "." + phenomenon_time;
          o.cell = cell;
          o.value = 100.0 * static_cast<double>(count) /
                    static_cast<double>(a.valid);
          o.unit = "percent";
          o.phenomenon_time = phenomenon_time;
          o.kind = manifest.require(o.property).kind;
          out.push_back(std::move(o));
        }
        break;
      case RasterStat::mean:
      case RasterStat::sum: {
        PropertyInfo info = manifest.require(property);
        Observation o;
        o.property = property;
        o.id = property + "." + cell.token() + "." + phenomenon_time;
        o.cell = cell;
        o.value = stat == RasterStat::mean
                      ? a.sum / static_cast<double>(a.valid)
                      : a.sum;
        o.unit = info.unit;
        o.phenomenon_time = phenomenon_time;
        o.kind = info.kind;
        out.push_back(std::move(o));
      }
    }
  }
  return out;
}

std::vector<Observation> roll_up(const std::vector<Observation>& obs,
                                 int to_level) {
  if (obs.empty()) return {};
  int common_level = obs.front().cell.level();
  for (const Observation& o : obs) {
    if (o.kind == QuantityKind::arithmetic) {
      throw ArithmeticAggregationError(
          "property " + o.property +
          " is an arithmetic quantity and cannot be summed over cells");
    }
    if (o.cell.level() != common_level) {
      throw Error("observations must share one level for roll-up");
    }
  }
  if (to_level >= common_level) {
    throw Error("roll-up target level must be above the observation level");
  }

  std::map<std::tuple<CellId, std::string, std::string>, Observation> groups;
  for (const Observation& o : obs) {
    CellId ancestor = o.cell.parent(to_level);
    auto key = std::make_tuple(ancestor, o.property, o.phenomenon_time);
    auto it = groups.find(key);
    if (it == groups.end()) {
      Observation rolled = o;
      rolled.cell = ancestor;
      rolled.id = o.property + "." + ancestor.token() +
                  (o.phenomenon_time.empty() ? "" : "." + o.phenomenon_time);
      groups.emplace(key, std::move(rolled));
    } else {
      it->second.value += o.value;
    }
  }
  std::vector<Observation> out;
  out.reserve(groups.size());
  for (auto& [key, o] : groups) out.push_back(std::move(o));
  return out;
}

double weighted_aggregate(const std::vector<Observation>& obs,
                          const Covering& region,
                          const std::function<double(CellId)>& weight) {
  double num = 0, den = 0;
  bool any = false;
  for (const Observation& o : obs) {
    if (!region.covers(o.cell)) continue;
    double w = weight(o.cell);
    if (w < 0) throw Error("weights must be nonnegative");
    any = true;
    num += w * o.value;
    den += w;
  }
  if (!any) throw Error("no observations fall inside the region");
  if (den == 0) throw Error("all weights are zero inside the region");
  return num / den;
}

}  // namespace geogrid
