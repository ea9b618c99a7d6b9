#include "geogrid/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "geogrid/error.hpp"

namespace geogrid {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Tolerance for boundary classification in face uv coordinates. Far below
// a leaf cell's extent, far above double rounding noise.
constexpr double kUvTol = 1e-13;

double angle_between(const Vec3& a, const Vec3& b) {
  // atan2 form is accurate for both small and near-pi angles.
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

// Signed turning angle at vertex b when travelling a -> b -> c.
// Positive for a left turn; exactly zero for collinear (great-circle) runs.
double turning_angle(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 in = a.cross(b).cross(b);
  Vec3 out = b.cross(c).cross(b);
  return std::atan2(b.dot(in.cross(out)), in.dot(out));
}

double turning_sum(const Loop& v) {
  double sum = 0;
  size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    sum += turning_angle(v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
  }
  return sum;
}

double fan_area(const Loop& v) {
  double sum = 0;
  for (size_t i = 1; i + 1 < v.size(); ++i) {
    sum += signed_triangle_area(v[0], v[i], v[i + 1]);
  }
  return sum;
}

// Point at fraction t along the geodesic a -> b.
Vec3 point_on_arc(const Vec3& a, const Vec3& b, double t) {
  double theta = angle_between(a, b);
  if (theta < 1e-15) return a;
  double s = std::sin(theta);
  return ((std::sin((1 - t) * theta) / s) * a + (std::sin(t * theta) / s) * b)
      .normalized();
}

// Distance from p to the arc a -> b.
double distance_to_arc(const Vec3& p, const Vec3& a, const Vec3& b) {
  Vec3 n = a.cross(b);
  double nn = n.norm();
  if (nn < 1e-30) return angle_between(p, a);
  n /= nn;
  // Closest point on the great circle falls within the arc iff p projects
  // between the endpoint planes.
  if (n.cross(a).dot(p) >= 0 && b.cross(n).dot(p) >= 0) {
    return std::abs(std::asin(std::clamp(n.dot(p), -1.0, 1.0)));
  }
  return std::min(angle_between(p, a), angle_between(p, b));
}

void check_loop(const Loop& v) {
  if (v.size() < 3) throw Error("polygon loop needs at least 3 vertices");
  size_t n = v.size();
  for (size_t i = 0; i < n; ++i) {
    const Vec3& a = v[i];
    const Vec3& b = v[(i + 1) % n];
    if ((a - b).squaredNorm() < 1e-28) {
      throw Error("degenerate loop: repeated consecutive vertices");
    }
    if ((a + b).squaredNorm() < 1e-28) {
      throw Error("degenerate loop: antipodal consecutive vertices");
    }
  }
}

}  // namespace

const char* to_string(CellRelation r) {
  switch (r) {
    case CellRelation::disjoint: return "disjoint";
    case CellRelation::touches: return "touches";
    case CellRelation::overlaps: return "overlaps";
    case CellRelation::crosses: return "crosses";
    case CellRelation::contains_cell: return "contains_cell";
    case CellRelation::within_cell: return "within_cell";
  }
  return "?";
}

double signed_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double num = a.dot(b.cross(c));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

double loop_area_left(const Loop& v) {
  double a_gb = 2 * kPi - turning_sum(v);
  double a_fan = fan_area(v);
  double k = std::round((a_gb - a_fan) / (4 * kPi));
  double resid = (a_gb - a_fan) / (4 * kPi) - k;
  // A half-period residual means the loop runs along a great circle and
  // the fan degenerates; Gauss-Bonnet is exact there.
  if (std::abs(resid) > 0.25) return std::clamp(a_gb, 0.0, 4 * kPi);
  return std::clamp(a_fan + 4 * kPi * k, 0.0, 4 * kPi);
}

bool loop_is_ccw(const Loop& v) { return loop_area_left(v) <= 2 * kPi; }

SphericalPolygon::SphericalPolygon(std::vector<Loop> loops)
    : loops_(std::move(loops)) {
  if (loops_.empty()) throw Error("polygon needs at least one loop");
  for (Loop& loop : loops_) check_loop(loop);
  // Normalize: shell CCW (interior on the left), holes CW.
  if (!loop_is_ccw(loops_[0])) std::reverse(loops_[0].begin(), loops_[0].end());
  for (size_t i = 1; i < loops_.size(); ++i) {
    if (loop_is_ccw(loops_[i])) std::reverse(loops_[i].begin(), loops_[i].end());
  }

  Vec3 sum = Vec3::Zero();
  for (const Vec3& p : loops_[0]) sum += p;
  cap_center_ = sum.norm() > 1e-9 ? Vec3(sum.normalized()) : loops_[0][0];
  cap_angle_ = 0;
  for (const Loop& loop : loops_) {
    for (const Vec3& p : loop) {
      cap_angle_ = std::max(cap_angle_, angle_between(cap_center_, p));
    }
  }
}

double area_sr(const SphericalPolygon& poly) {
  if (poly.empty()) return 0;
  double total = loop_area_left(poly.shell());
  for (size_t i = 1; i < poly.loops().size(); ++i) {
    total -= 4 * kPi - loop_area_left(poly.loops()[i]);
  }
  return total;
}

double area_sr(const MultiPolygon& poly) {
  double total = 0;
  for (const auto& part : poly.parts) total += area_sr(part);
  return total;
}

namespace {

int densify_steps(const LatLng& a, const LatLng& b, double max_step_deg) {
  double dlat = b.lat() - a.lat();
  double dlng = b.lng() - a.lng();
  if (std::abs(dlng) >= 180.0) {
    throw Error(
        "edge spans >=180 deg of longitude; split at the antimeridian first");
  }
  return std::max(
      1, static_cast<int>(std::ceil(std::hypot(dlat, dlng) / max_step_deg)));
}

void densify_edge(const LatLng& a, const LatLng& b, double max_step_deg,
                  std::vector<Vec3>* out) {
  double dlat = b.lat() - a.lat();
  double dlng = b.lng() - a.lng();
  int steps = densify_steps(a, b, max_step_deg);
  for (int k = 0; k < steps; ++k) {
    double f = static_cast<double>(k) / steps;
    out->push_back(LatLng(a.lat() + f * dlat, a.lng() + f * dlng).to_point());
  }
}

}  // namespace

Loop densify_ring(const std::vector<LatLng>& planar_ring, double max_step_deg) {
  if (max_step_deg <= 0) throw Error("max_step must be positive");
  std::vector<LatLng> ring = planar_ring;
  if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
  if (ring.size() < 3) throw Error("ring needs at least 3 distinct vertices");

  double area2 = 0;  // planar shoelace; zero means a degenerate ring
  for (size_t i = 0; i < ring.size(); ++i) {
    const LatLng& a = ring[i];
    const LatLng& b = ring[(i + 1) % ring.size()];
    area2 += a.lng() * b.lat() - b.lng() * a.lat();
  }
  if (area2 == 0) throw Error("degenerate ring: zero planar area");

  Loop out;
  for (size_t i = 0; i < ring.size(); ++i) {
    densify_edge(ring[i], ring[(i + 1) % ring.size()], max_step_deg, &out);
  }
  return out;
}

std::vector<Vec3> densify_line(const std::vector<LatLng>& planar_line,
                               double max_step_deg) {
  if (max_step_deg <= 0) throw Error("max_step must be positive");
  if (planar_line.size() < 2) throw Error("line needs at least 2 vertices");
  std::vector<Vec3> out;
  for (size_t i = 0; i + 1 < planar_line.size(); ++i) {
    densify_edge(planar_line[i], planar_line[i + 1], max_step_deg, &out);
  }
  out.push_back(planar_line.back().to_point());
  return out;
}

SphericalPolygon cell_polygon(CellId c) {
  auto verts = c.vertices();
  return SphericalPolygon({Loop(verts.begin(), verts.end())});
}

PointLoc locate(const SphericalPolygon& poly, const Vec3& p,
                double boundary_tol_rad) {
  // Boundary first, so the containment tie rule is deterministic.
  for (const Loop& loop : poly.loops()) {
    size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
      if (distance_to_arc(p, loop[i], loop[(i + 1) % n]) <= boundary_tol_rad) {
        return PointLoc::boundary;
      }
    }
  }
  // Winding number: +1 from the CCW shell, -1 from any CW hole around p.
  double total = 0;
  for (const Loop& loop : poly.loops()) {
    size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
      const Vec3& a = loop[i];
      const Vec3& b = loop[(i + 1) % n];
      Vec3 ua = a - p * p.dot(a);
      Vec3 ub = b - p * p.dot(b);
      total += std::atan2(p.dot(ua.cross(ub)), ua.dot(ub));
    }
  }
  return std::lround(total / (2 * kPi)) == 1 ? PointLoc::interior
                                             : PointLoc::exterior;
}

bool contains_point(const SphericalPolygon& poly, const Vec3& p) {
  return locate(poly, p) != PointLoc::exterior;
}

double distance_to_boundary(const SphericalPolygon& poly, const Vec3& p) {
  double best = kPi;
  for (const Loop& loop : poly.loops()) {
    size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
      best = std::min(best, distance_to_arc(p, loop[i], loop[(i + 1) % n]));
    }
  }
  return best;
}

CellGeom::CellGeom(CellId c) : id_(c) {
  face_ = c.face();
  c.uv_bounds(&u0_, &u1_, &v0_, &v1_);
  Vec3 f = face_axis(face_);
  Vec3 u = face_u_axis(face_);
  Vec3 v = face_v_axis(face_);
  planes_ = {
      (u - u0_ * f).normalized(),  // u >= u0
      (u1_ * f - u).normalized(),  // u <= u1
      (v - v0_ * f).normalized(),  // v >= v0
      (v1_ * f - v).normalized(),  // v <= v1
  };
  corners_ = c.vertices();
  center_ = c.center();
  cap_angle_ = 0;
  for (const Vec3& p : corners_) {
    cap_angle_ = std::max(cap_angle_, angle_between(center_, p));
  }
  area_ = c.area_sr();
}

CellGeom::Side CellGeom::side(const Vec3& p) const {
  double w = p.dot(face_axis(face_));
  if (w <= 0) return Side::outside;
  double u = p.dot(face_u_axis(face_)) / w;
  double v = p.dot(face_v_axis(face_)) / w;
  if (u < u0_ - kUvTol || u > u1_ + kUvTol || v < v0_ - kUvTol ||
      v > v1_ + kUvTol) {
    return Side::outside;
  }
  if (u > u0_ + kUvTol && u < u1_ - kUvTol && v > v0_ + kUvTol &&
      v < v1_ - kUvTol) {
    return Side::inside;
  }
  return Side::boundary;
}

namespace {

// Clipped parameter interval of the arc a->b against the cell's four
// half-spaces. An arc's signed distance to a great-circle plane changes
// sign at most once, so interval clipping is exact.
struct ArcClip {
  bool empty = true;
  double t0 = 0, t1 = 1;
};

double crossing_parameter(const Vec3& a, const Vec3& b, const Vec3& n) {
  Vec3 m = a.cross(b);
  Vec3 x = n.cross(m);
  double xn = x.norm();
  if (xn < 1e-30) return 0.5;  // arc lies in the clip plane
  x /= xn;
  // The signs of n·a and n·b differ, so the chord picks the on-arc candidate.
  double da = n.dot(a), db = n.dot(b);
  Vec3 approx = a + (b - a) * (da / (da - db));
  if (x.dot(approx) < 0) x = -x;
  double theta = angle_between(a, b);
  return theta < 1e-15 ? 0.5
                       : std::clamp(angle_between(a, x) / theta, 0.0, 1.0);
}

ArcClip clip_arc_to_cell(const Vec3& a, const Vec3& b, const CellGeom& cell) {
  ArcClip clip;
  double t0 = 0, t1 = 1;
  for (const Vec3& n : cell.planes()) {
    double da = n.dot(a), db = n.dot(b);
    if (da < 0 && db < 0) return clip;
    if (da >= 0 && db >= 0) continue;
    double t = crossing_parameter(a, b, n);
    if (da < 0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (t0 > t1) return clip;
  clip.empty = false;
  clip.t0 = t0;
  clip.t1 = t1;
  return clip;
}

enum class Presence { none, touch, interior };

Presence arc_presence(const Vec3& a, const Vec3& b, const CellGeom& cell) {
  ArcClip clip = clip_arc_to_cell(a, b, cell);
  if (clip.empty) return Presence::none;
  if (clip.t1 - clip.t0 < 1e-12) return Presence::touch;
  Vec3 mid = point_on_arc(a, b, 0.5 * (clip.t0 + clip.t1));
  return cell.side(mid) == CellGeom::Side::inside ? Presence::interior
                                                  : Presence::touch;
}

// Sutherland-Hodgman against one great-circle half-space (n·p >= 0).
Loop clip_loop(const Loop& in, const Vec3& n) {
  Loop out;
  size_t cnt = in.size();
  for (size_t i = 0; i < cnt; ++i) {
    const Vec3& a = in[i];
    const Vec3& b = in[(i + 1) % cnt];
    double da = n.dot(a), db = n.dot(b);
    bool ina = da >= 0, inb = db >= 0;
    if (ina) out.push_back(a);
    if (ina != inb) {
      out.push_back(point_on_arc(a, b, crossing_parameter(a, b, n)));
    }
  }
  return out;
}

bool caps_disjoint(const Vec3& c1, double a1, const Vec3& c2, double a2) {
  return angle_between(c1, c2) > a1 + a2;
}

}  // namespace

bool polygon_within_cell(const SphericalPolygon& poly, const CellGeom& cell) {
  // Cells are geodesically convex, so vertex containment suffices.
  for (const Loop& loop : poly.loops()) {
    for (const Vec3& p : loop) {
      if (cell.side(p) == CellGeom::Side::outside) return false;
    }
  }
  return true;
}

bool polygon_contains_cell(const SphericalPolygon& poly, const CellGeom& cell) {
  for (const Vec3& corner : cell.corners()) {
    if (!contains_point(poly, corner)) return false;
  }
  // No part of the polygon boundary may pass through the cell's interior.
  for (const Loop& loop : poly.loops()) {
    size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
      if (arc_presence(loop[i], loop[(i + 1) % n], cell) ==
          Presence::interior) {
        return false;
      }
    }
  }
  return true;
}

CellRelation relate_cell(const SphericalPolygon& poly, CellId c) {
  CellGeom cell(c);
  if (caps_disjoint(poly.cap_center(), poly.cap_angle(), cell.center(),
                    cell.cap_angle())) {
    return CellRelation::disjoint;
  }

  bool vertex_inside = false, vertex_boundary = false;
  for (const Loop& loop : poly.loops()) {
    for (const Vec3& p : loop) {
      CellGeom::Side s = cell.side(p);
      if (s == CellGeom::Side::inside) vertex_inside = true;
      if (s == CellGeom::Side::boundary) vertex_boundary = true;
    }
  }

  bool edge_interior = false, edge_touch = false;
  if (!vertex_inside) {
    for (const Loop& loop : poly.loops()) {
      size_t n = loop.size();
      for (size_t i = 0; i < n && !edge_interior; ++i) {
        switch (arc_presence(loop[i], loop[(i + 1) % n], cell)) {
          case Presence::interior: edge_interior = true; break;
          case Presence::touch: edge_touch = true; break;
          case Presence::none: break;
        }
      }
      if (edge_interior) break;
    }
  }

  int corners_interior = 0, corners_boundary = 0;
  for (const Vec3& corner : cell.corners()) {
    switch (locate(poly, corner)) {
      case PointLoc::interior: corners_interior++; break;
      case PointLoc::boundary: corners_boundary++; break;
      case PointLoc::exterior: break;
    }
  }

  if (vertex_inside || edge_interior || corners_interior > 0) {
    if (polygon_contains_cell(poly, cell)) return CellRelation::contains_cell;
    if (polygon_within_cell(poly, cell)) return CellRelation::within_cell;
    return CellRelation::overlaps;
  }
  if (vertex_boundary || edge_touch || corners_boundary > 0) {
    // A polygon exactly equal to the cell lands here: all contacts are
    // boundary contacts. Classify it as contains_cell; enrichment detects
    // equality through the two fine predicates.
    if (polygon_contains_cell(poly, cell) && polygon_within_cell(poly, cell)) {
      return CellRelation::contains_cell;
    }
    return CellRelation::touches;
  }
  return CellRelation::disjoint;
}

CellRelation relate_cell(const GeodesicChain& chain, CellId c) {
  if (chain.vertices.size() < 2) throw Error("chain needs >= 2 vertices");
  CellGeom cell(c);
  bool any_interior = false, any_touch = false, any_outside = false;
  for (const Vec3& p : chain.vertices) {
    if (cell.side(p) == CellGeom::Side::outside) any_outside = true;
  }
  for (size_t i = 0; i + 1 < chain.vertices.size(); ++i) {
    const Vec3& a = chain.vertices[i];
    const Vec3& b = chain.vertices[i + 1];
    ArcClip clip = clip_arc_to_cell(a, b, cell);
    if (clip.empty) continue;
    if (clip.t0 > 1e-12 || clip.t1 < 1 - 1e-12) any_outside = true;
    if (clip.t1 - clip.t0 < 1e-12) {
      any_touch = true;
      continue;
    }
    Vec3 mid = point_on_arc(a, b, 0.5 * (clip.t0 + clip.t1));
    if (cell.side(mid) == CellGeom::Side::inside) {
      any_interior = true;
    } else {
      any_touch = true;
    }
  }
  if (!any_interior && !any_touch) return CellRelation::disjoint;
  if (any_interior && any_outside) return CellRelation::crosses;
  if (any_interior) return CellRelation::within_cell;
  return CellRelation::touches;
}

CellRelation relate_cell(const Vec3& point, CellId c) {
  CellGeom cell(c);
  switch (cell.side(point)) {
    case CellGeom::Side::inside: return CellRelation::within_cell;
    case CellGeom::Side::boundary: return CellRelation::touches;
    default: return CellRelation::disjoint;
  }
}

CellRelation relate_cell(const MultiPolygon& poly, CellId c) {
  bool any_within = false, any_touch = false, any_overlap = false;
  for (const auto& part : poly.parts) {
    switch (relate_cell(part, c)) {
      case CellRelation::contains_cell: return CellRelation::contains_cell;
      case CellRelation::within_cell: any_within = true; break;
      case CellRelation::overlaps:
      case CellRelation::crosses: any_overlap = true; break;
      case CellRelation::touches: any_touch = true; break;
      case CellRelation::disjoint: break;
    }
  }
  if (any_overlap || (any_within && any_touch)) return CellRelation::overlaps;
  if (any_within) return CellRelation::within_cell;
  if (any_touch) return CellRelation::touches;
  return CellRelation::disjoint;
}

double overlap_area_sr(const SphericalPolygon& poly, const CellGeom& cell) {
  if (caps_disjoint(poly.cap_center(), poly.cap_angle(), cell.center(),
                    cell.cap_angle())) {
    return 0;
  }
  double total = 0;
  for (const Loop& loop : poly.loops()) {
    Loop clipped = loop;
    for (const Vec3& n : cell.planes()) {
      clipped = clip_loop(clipped, n);
      if (clipped.size() < 3) {
        clipped.clear();
        break;
      }
    }
    // Shell loops contribute positive area, holes (clockwise) negative.
    if (clipped.size() >= 3) total += fan_area(clipped);
  }
  return std::clamp(total, 0.0, cell.area_sr());
}

double overlap_area_sr(const MultiPolygon& poly, const CellGeom& cell) {
  double total = 0;
  for (const auto& part : poly.parts) total += overlap_area_sr(part, cell);
  return std::clamp(total, 0.0, cell.area_sr());
}

double overlap_fraction(const SphericalPolygon& poly, CellId c) {
  CellGeom cell(c);
  switch (relate_cell(poly, c)) {
    case CellRelation::disjoint:
    case CellRelation::touches: return 0.0;
    case CellRelation::contains_cell: return 1.0;
    default: return overlap_area_sr(poly, cell) / cell.area_sr();
  }
}

double overlap_fraction(const MultiPolygon& poly, CellId c) {
  CellGeom cell(c);
  switch (relate_cell(poly, c)) {
    case CellRelation::disjoint:
    case CellRelation::touches: return 0.0;
    case CellRelation::contains_cell: return 1.0;
    default: return overlap_area_sr(poly, cell) / cell.area_sr();
  }
}

}  // namespace geogrid
