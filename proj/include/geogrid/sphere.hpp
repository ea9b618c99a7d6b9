#pragma once

#include <array>
#include <vector>

#include "geogrid/cell.hpp"

namespace geogrid {

/// Closed ring of unit vectors; the last vertex connects back to the first.
using Loop = std::vector<Vec3>;

/// Open polyline of unit vectors with geodesic segments (>= 2 vertices,
/// consecutive vertices distinct, each arc shorter than pi).
struct GeodesicChain {
  std::vector<Vec3> vertices;
};

/// How a geometry relates to a cell, following the point/line/area DE-9IM
/// combinations relevant to grid enrichment.
enum class CellRelation {
  disjoint,
  touches,
  overlaps,
  crosses,
  contains_cell,  // the geometry contains the cell
  within_cell,    // the geometry lies within the cell
};

const char* to_string(CellRelation r);

/// Region bounded by geodesic loops: loops[0] is the outer shell
/// (counterclockwise), the rest are holes (clockwise). Orientations are
/// normalized on construction assuming each ring encloses less than a
/// hemisphere. A bounding cap is cached for fast rejection.
class SphericalPolygon {
 public:
  SphericalPolygon() = default;
  explicit SphericalPolygon(std::vector<Loop> loops);

  const std::vector<Loop>& loops() const { return loops_; }
  const Loop& shell() const { return loops_.front(); }
  bool empty() const { return loops_.empty(); }

  const Vec3& cap_center() const { return cap_center_; }
  double cap_angle() const { return cap_angle_; }

 private:
  std::vector<Loop> loops_;
  Vec3 cap_center_ = Vec3::UnitX();
  double cap_angle_ = 0;
};

/// Disconnected polygon parts (multipolygon); parts must be disjoint.
struct MultiPolygon {
  std::vector<SphericalPolygon> parts;
};

// --- construction -----------------------------------------------------------

/// Subdivide the edges of a planar (lat/lng-linear) ring so consecutive
/// vertices are at most `max_step_deg` apart in lat/lng space, then project
/// to unit vectors. Original vertices are preserved. The ring may carry an
/// explicit closing vertex or not.
Loop densify_ring(const std::vector<LatLng>& planar_ring, double max_step_deg);

/// Same subdivision for an open polyline.
std::vector<Vec3> densify_line(const std::vector<LatLng>& planar_line,
                               double max_step_deg);

/// Default densification step: keeps the planar-vs-geodesic deviation well
/// under a reference-cell width at mid-latitudes.
inline constexpr double kDefaultDensifyStepDeg = 0.05;

/// The cell's boundary as a 4-vertex geodesic polygon (CCW).
SphericalPolygon cell_polygon(CellId c);

// --- loop measures ----------------------------------------------------------

/// Signed area of the spherical triangle (a, b, c); positive when CCW.
double signed_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Area of the region to the left of the loop's direction of travel,
/// in [0, 4pi). Exact for great-circle ("hemisphere") loops.
double loop_area_left(const Loop& loop);

/// True if the loop encloses the smaller side counterclockwise.
bool loop_is_ccw(const Loop& loop);

/// Polygon area in steradians; holes subtract.
double area_sr(const SphericalPolygon& poly);
double area_sr(const MultiPolygon& poly);

// --- point predicates -------------------------------------------------------

enum class PointLoc { interior, boundary, exterior };

PointLoc locate(const SphericalPolygon& poly, const Vec3& p,
                double boundary_tol_rad = 1e-12);

/// Closed containment: boundary points count as contained.
bool contains_point(const SphericalPolygon& poly, const Vec3& p);

/// Angular distance from p to the nearest point of the loop's boundary.
double distance_to_boundary(const SphericalPolygon& poly, const Vec3& p);

// --- cell predicates --------------------------------------------------------

/// Precomputed clipping frame for one cell: inward plane normals, corners,
/// a bounding cap and the exact area.
class CellGeom {
 public:
  explicit CellGeom(CellId c);

  CellId id() const { return id_; }
  const std::array<Vec3, 4>& planes() const { return planes_; }
  const std::array<Vec3, 4>& corners() const { return corners_; }
  const Vec3& center() const { return center_; }
  double cap_angle() const { return cap_angle_; }
  double area_sr() const { return area_; }

  enum class Side { inside, boundary, outside };
  Side side(const Vec3& p) const;

 private:
  CellId id_;
  int face_;
  double u0_, u1_, v0_, v1_;
  std::array<Vec3, 4> planes_;
  std::array<Vec3, 4> corners_;
  Vec3 center_;
  double cap_angle_;
  double area_;
};

CellRelation relate_cell(const SphericalPolygon& poly, CellId c);
CellRelation relate_cell(const GeodesicChain& chain, CellId c);
CellRelation relate_cell(const Vec3& point, CellId c);
CellRelation relate_cell(const MultiPolygon& poly, CellId c);

bool polygon_contains_cell(const SphericalPolygon& poly, const CellGeom& cell);
bool polygon_within_cell(const SphericalPolygon& poly, const CellGeom& cell);

/// Area of polygon-with-cell intersection, in steradians.
double overlap_area_sr(const SphericalPolygon& poly, const CellGeom& cell);
double overlap_area_sr(const MultiPolygon& poly, const CellGeom& cell);

/// area(poly ∩ cell) / area(cell), in [0, 1]. Multiplying by the cell's
/// area gives the overlap on the Earth's surface.
double overlap_fraction(const SphericalPolygon& poly, CellId c);
double overlap_fraction(const MultiPolygon& poly, CellId c);

}  // namespace geogrid
