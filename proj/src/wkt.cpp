#include "geogrid/wkt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>

#include "geogrid/error.hpp"

namespace geogrid {

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  size_t offset() const { return pos_; }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      pos_++;
    }
  }

  bool match(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      pos_++;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!match(c)) {
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  std::string word() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < text_.size() &&
           std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      pos_++;
    }
    std::string w(text_.substr(start, pos_ - start));
    std::transform(w.begin(), w.end(), w.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    return w;
  }

  double number() {
    skip_ws();
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    double value = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number", pos_);
    pos_ += static_cast<size_t>(end - begin);
    return value;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
};

LatLng coordinate(Scanner& s) {
  size_t at = s.offset();
  double lng = s.number();
  double lat = s.number();
  try {
    return LatLng(lat, lng);
  } catch (const Error& e) {
    throw ParseError(e.what(), at);
  }
}

std::vector<LatLng> coordinate_list(Scanner& s) {
  std::vector<LatLng> out;
  s.expect('(');
  do {
    out.push_back(coordinate(s));
  } while (s.match(','));
  s.expect(')');
  return out;
}

std::vector<std::vector<LatLng>> ring_list(Scanner& s) {
  std::vector<std::vector<LatLng>> rings;
  s.expect('(');
  do {
    size_t at = s.offset();
    std::vector<LatLng> ring = coordinate_list(s);
    if (ring.size() < 4 || !(ring.front() == ring.back())) {
      throw ParseError("unclosed ring", at);
    }
    rings.push_back(std::move(ring));
  } while (s.match(','));
  s.expect(')');
  return rings;
}

std::string format_coord(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    size_t last = s.find_last_not_of('0');
    if (s[last] == '.') last--;
    s.erase(last + 1);
  }
  if (s == "-0") s = "0";
  return s;
}

std::string format_point(const LatLng& p) {
  return format_coord(p.lng()) + " " + format_coord(p.lat());
}

void append_ring(const std::vector<LatLng>& ring, std::string* out) {
  out->push_back('(');
  for (size_t i = 0; i < ring.size(); ++i) {
    if (i) out->append(", ");
    out->append(format_point(ring[i]));
  }
  out->push_back(')');
}

// --- planar antimeridian splitting ------------------------------------------

struct PlanarPt {
  double lng, lat;  // lng possibly unwrapped beyond +/-180
};

// Sutherland-Hodgman against lng >= bound or lng <= bound.
std::vector<PlanarPt> clip_lng(const std::vector<PlanarPt>& in, double bound,
                               bool keep_greater) {
  std::vector<PlanarPt> out;
  size_t n = in.size();
  auto inside = [&](const PlanarPt& p) {
    return keep_greater ? p.lng >= bound : p.lng <= bound;
  };
  for (size_t i = 0; i < n; ++i) {
    const PlanarPt& a = in[i];
    const PlanarPt& b = in[(i + 1) % n];
    bool ia = inside(a), ib = inside(b);
    if (ia) out.push_back(a);
    if (ia != ib) {
      double t = (bound - a.lng) / (b.lng - a.lng);
      out.push_back({bound, a.lat + t * (b.lat - a.lat)});
    }
  }
  return out;
}

std::vector<std::vector<PlanarPt>> split_ring_at_antimeridian(
    const std::vector<LatLng>& corners, double pole_lat) {
  // Unwrap longitudes into a continuous walk.
  std::vector<PlanarPt> walk;
  walk.push_back({corners[0].lng(), corners[0].lat()});
  for (size_t i = 1; i < corners.size(); ++i) {
    double prev = walk.back().lng;
    double lng = corners[i].lng();
    while (lng - prev > 180) lng -= 360;
    while (lng - prev < -180) lng += 360;
    walk.push_back({lng, corners[i].lat()});
  }
  // A pole-wrapping ring unwraps to a full turn; close it through the
  // pole parallel.
  double closure = walk.front().lng;
  {
    double prev = walk.back().lng;
    while (closure - prev > 180) closure -= 360;
    while (closure - prev < -180) closure += 360;
  }
  if (closure != walk.front().lng) {
    walk.push_back({closure, walk.front().lat});
    walk.push_back({closure, pole_lat});
    walk.push_back({walk.front().lng, pole_lat});
  }

  // Clip the unwrapped walk to the three candidate strips and shift the
  // outer ones back into range.
  std::vector<std::vector<PlanarPt>> parts;
  for (double shift : {-360.0, 0.0, 360.0}) {
    std::vector<PlanarPt> strip = clip_lng(walk, -180 + shift, true);
    strip = clip_lng(strip, 180 + shift, false);
    // Drop degenerate output.
    double area2 = 0;
    for (size_t i = 0; i < strip.size(); ++i) {
      const PlanarPt& a = strip[i];
      const PlanarPt& b = strip[(i + 1) % strip.size()];
      area2 += a.lng * b.lat - b.lng * a.lat;
    }
    if (strip.size() < 3 || std::abs(area2) < 1e-12) continue;
    std::vector<PlanarPt> ring;
    for (const PlanarPt& p : strip) {
      double lng = std::clamp(p.lng - shift, -180.0, 180.0);
      // -180 has no representation of its own (it normalizes to +180 on
      // parse, which would re-create the crossing); nudge by ~0.11 m.
      if (lng == -180.0) lng = -179.999999;
      ring.push_back({lng, std::clamp(p.lat, -90.0, 90.0)});
    }
    ring.push_back(ring.front());
    parts.push_back(std::move(ring));
  }
  return parts;
}

std::string format_planar(const PlanarPt& p) {
  return format_coord(p.lng) + " " + format_coord(p.lat);
}

void append_planar_ring(const std::vector<PlanarPt>& ring, std::string* out) {
  out->push_back('(');
  for (size_t i = 0; i < ring.size(); ++i) {
    if (i) out->append(", ");
    out->append(format_planar(ring[i]));
  }
  out->push_back(')');
}

}  // namespace

AntimeridianPolicy antimeridian_policy_from_string(std::string_view s) {
  if (s == "split") return AntimeridianPolicy::split;
  if (s == "reject") return AntimeridianPolicy::reject;
  if (s == "point" || s == "point-abstract") {
    return AntimeridianPolicy::point_abstract;
  }
  throw Error("unknown antimeridian policy: " + std::string(s));
}

const char* to_string(AntimeridianPolicy p) {
  switch (p) {
    case AntimeridianPolicy::split: return "split";
    case AntimeridianPolicy::reject: return "reject";
    case AntimeridianPolicy::point_abstract: return "point";
  }
  return "?";
}

const char* to_string(WktGeometry::Kind k) {
  switch (k) {
    case WktGeometry::Kind::point: return "POINT";
    case WktGeometry::Kind::line_string: return "LINESTRING";
    case WktGeometry::Kind::polygon: return "POLYGON";
    case WktGeometry::Kind::multi_point: return "MULTIPOINT";
    case WktGeometry::Kind::multi_line_string: return "MULTILINESTRING";
    case WktGeometry::Kind::multi_polygon: return "MULTIPOLYGON";
  }
  return "?";
}

bool detect_crossing(const std::vector<LatLng>& ring) {
  if (ring.size() < 2) throw Error("need at least 2 vertices");
  for (size_t i = 0; i + 1 < ring.size(); ++i) {
    if (std::abs(ring[i + 1].lng() - ring[i].lng()) >= 180.0) return true;
  }
  // Pole-in-loop test on the vertices as a geodesic ring.
  std::vector<LatLng> distinct = ring;
  if (distinct.size() >= 2 && distinct.front() == distinct.back()) {
    distinct.pop_back();
  }
  if (distinct.size() < 3) return false;
  Loop loop;
  for (const LatLng& p : distinct) loop.push_back(p.to_point());
  try {
    SphericalPolygon poly({loop});
    if (locate(poly, Vec3(0, 0, 1)) == PointLoc::interior) return true;
    if (locate(poly, Vec3(0, 0, -1)) == PointLoc::interior) return true;
  } catch (const Error&) {
    return false;  // degenerate ring; gap rule already said no
  }
  return false;
}

WktGeometry parse_wkt(std::string_view text) {
  Scanner s(text);
  if (s.at_end()) throw ParseError("empty input", 0);
  std::string kind = s.word();
  WktGeometry geom;
  if (kind == "POINT") {
    geom.kind = WktGeometry::Kind::point;
    s.expect('(');
    geom.points.push_back(coordinate(s));
    s.expect(')');
  } else if (kind == "LINESTRING") {
    geom.kind = WktGeometry::Kind::line_string;
    geom.lines.push_back(coordinate_list(s));
    if (geom.lines.back().size() < 2) {
      throw ParseError("linestring needs at least 2 points", s.offset());
    }
  } else if (kind == "POLYGON") {
    geom.kind = WktGeometry::Kind::polygon;
    geom.polygons.push_back(ring_list(s));
  } else if (kind == "MULTIPOINT") {
    geom.kind = WktGeometry::Kind::multi_point;
    s.expect('(');
    do {
      bool wrapped = s.match('(');
      geom.points.push_back(coordinate(s));
      if (wrapped) s.expect(')');
    } while (s.match(','));
    s.expect(')');
  } else if (kind == "MULTILINESTRING") {
    geom.kind = WktGeometry::Kind::multi_line_string;
    s.expect('(');
    do {
      geom.lines.push_back(coordinate_list(s));
    } while (s.match(','));
    s.expect(')');
  } else if (kind == "MULTIPOLYGON") {
    geom.kind = WktGeometry::Kind::multi_polygon;
    s.expect('(');
    do {
      geom.polygons.push_back(ring_list(s));
    } while (s.match(','));
    s.expect(')');
  } else {
    throw ParseError("unsupported geometry kind '" + kind + "'", 0);
  }
  if (!s.at_end()) throw ParseError("trailing characters", s.offset());

  for (const auto& line : geom.lines) {
    if (detect_crossing(line)) geom.antimeridian_crossing = true;
  }
  for (const auto& poly : geom.polygons) {
    for (const auto& ring : poly) {
      if (detect_crossing(ring)) geom.antimeridian_crossing = true;
    }
  }
  return geom;
}

std::string to_wkt(const WktGeometry& geom) {
  std::string out = to_string(geom.kind);
  switch (geom.kind) {
    case WktGeometry::Kind::point:
      out += "(" + format_point(geom.points.at(0)) + ")";
      break;
    case WktGeometry::Kind::multi_point: {
      out += "(";
      for (size_t i = 0; i < geom.points.size(); ++i) {
        if (i) out += ", ";
        out += format_point(geom.points[i]);
      }
      out += ")";
      break;
    }
    case WktGeometry::Kind::line_string:
      append_ring(geom.lines.at(0), &out);
      break;
    case WktGeometry::Kind::multi_line_string: {
      out += "(";
      for (size_t i = 0; i < geom.lines.size(); ++i) {
        if (i) out += ", ";
        append_ring(geom.lines[i], &out);
      }
      out += ")";
      break;
    }
    case WktGeometry::Kind::polygon: {
      out += "(";
      for (size_t i = 0; i < geom.polygons.at(0).size(); ++i) {
        if (i) out += ", ";
        append_ring(geom.polygons[0][i], &out);
      }
      out += ")";
      break;
    }
    case WktGeometry::Kind::multi_polygon: {
      out += "(";
      for (size_t p = 0; p < geom.polygons.size(); ++p) {
        if (p) out += ", ";
        out += "(";
        for (size_t i = 0; i < geom.polygons[p].size(); ++i) {
          if (i) out += ", ";
          append_ring(geom.polygons[p][i], &out);
        }
        out += ")";
      }
      out += ")";
      break;
    }
  }
  return out;
}

bool cell_crosses_antimeridian(CellId c) {
  std::vector<LatLng> corners;
  for (const Vec3& v : c.vertices()) corners.push_back(LatLng::from_point(v));
  corners.push_back(corners.front());
  for (size_t i = 0; i + 1 < corners.size(); ++i) {
    if (std::abs(corners[i + 1].lng() - corners[i].lng()) >= 180.0) return true;
  }
  CellGeom geom(c);
  return geom.side(Vec3(0, 0, 1)) != CellGeom::Side::outside ||
         geom.side(Vec3(0, 0, -1)) != CellGeom::Side::outside;
}

std::string cell_to_wkt(CellId c, AntimeridianPolicy policy) {
  std::vector<LatLng> corners;
  for (const Vec3& v : c.vertices()) corners.push_back(LatLng::from_point(v));

  if (!cell_crosses_antimeridian(c)) {
    std::string out = "POLYGON(";
    std::vector<LatLng> ring = corners;
    ring.push_back(ring.front());
    append_ring(ring, &out);
    out += ")";
    return out;
  }

  switch (policy) {
    case AntimeridianPolicy::reject:
      throw Error("cell " + c.token() +
                  " crosses the antimeridian or wraps a pole");
    case AntimeridianPolicy::point_abstract:
      return "POINT(" + format_point(c.center_latlng()) + ")";
    case AntimeridianPolicy::split:
      break;
  }

  CellGeom geom(c);
  bool north = geom.side(Vec3(0, 0, 1)) != CellGeom::Side::outside;
  auto parts = split_ring_at_antimeridian(corners, north ? 90.0 : -90.0);
  if (parts.empty()) throw Error("antimeridian split produced no parts");
  if (parts.size() == 1) {
    std::string out = "POLYGON(";
    append_planar_ring(parts[0], &out);
    out += ")";
    return out;
  }
  std::string out = "MULTIPOLYGON(";
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += "(";
    append_planar_ring(parts[i], &out);
    out += ")";
  }
  out += ")";
  return out;
}

MultiPolygon to_spherical(const WktGeometry& geom, double max_step_deg) {
  if (!geom.is_areal()) throw Error("geometry is not areal");
  MultiPolygon out;
  for (const auto& rings : geom.polygons) {
    std::vector<Loop> loops;
    for (const auto& ring : rings) {
      loops.push_back(densify_ring(ring, max_step_deg));
    }
    out.parts.emplace_back(std::move(loops));
  }
  return out;
}

std::vector<GeodesicChain> to_chains(const WktGeometry& geom,
                                     double max_step_deg) {
  if (geom.kind != WktGeometry::Kind::line_string &&
      geom.kind != WktGeometry::Kind::multi_line_string) {
    throw Error("geometry is not lineal");
  }
  std::vector<GeodesicChain> out;
  for (const auto& line : geom.lines) {
    out.push_back(GeodesicChain{densify_line(line, max_step_deg)});
  }
  return out;
}

std::vector<WktRecord> read_wkt_records(std::istream& in) {
  std::vector<WktRecord> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("expected id<TAB>WKT", line_no);
    }
    WktRecord rec;
    rec.id = line.substr(0, tab);
    try {
      rec.geometry = parse_wkt(std::string_view(line).substr(tab + 1));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what(),
                       line_no);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace geogrid
