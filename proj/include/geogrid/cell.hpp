#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace geogrid {

using Vec3 = Eigen::Vector3d;

inline constexpr int kMaxCellLevel = 30;
inline constexpr int kNumFaces = 6;
inline constexpr int kFaceBits = 3;
inline constexpr int kPosBits = 2 * kMaxCellLevel + 1;  // 61
inline constexpr uint32_t kLimitIJ = uint32_t{1} << kMaxCellLevel;

/// Authalic Earth radius, used for all steradian -> km^2 conversions.
inline constexpr double kEarthRadiusKm = 6371.0072;

/// Geographic coordinate pair in degrees. Bounds are enforced on
/// construction and longitude -180 is normalized to +180 so every point
/// has a single representation.
class LatLng {
 public:
  LatLng() : lat_(0), lng_(0) {}
  LatLng(double lat_deg, double lng_deg);

  double lat() const { return lat_; }
  double lng() const { return lng_; }

  Vec3 to_point() const;
  static LatLng from_point(const Vec3& p);

  friend bool operator==(const LatLng& a, const LatLng& b) {
    return a.lat_ == b.lat_ && a.lng_ == b.lng_;
  }

 private:
  double lat_, lng_;
};

/// Leaf-cell coordinates on one cube face plus the Hilbert curve
/// orientation at that position. Round-trips with CellId exactly at
/// level 30.
struct FaceIJ {
  int face = 0;          // 0..5
  uint32_t i = 0;        // 0..2^30-1
  uint32_t j = 0;        // 0..2^30-1
  int orientation = 0;   // swap/invert bits of the Hilbert frame

  friend bool operator==(const FaceIJ&, const FaceIJ&) = default;
};

/// 64-bit cell identifier on the cube-face Hilbert curve.
///
/// The top 3 bits select one of the six cube faces; the next 2*level bits
/// are the Hilbert curve position; a single trailing 1 bit marks the
/// level. Ids at a fixed level are ordered along the space-filling curve,
/// and the ids of a cell's descendants form a contiguous range.
class CellId {
 public:
  constexpr CellId() : id_(0) {}
  constexpr explicit CellId(uint64_t id) : id_(id) {}

  static CellId from_face(int face);
  static CellId from_face_ij(int face, uint32_t i, uint32_t j);  // leaf
  static CellId from_latlng(const LatLng& ll, int level);
  static CellId from_point(const Vec3& p, int level);
  static std::optional<CellId> from_token(std::string_view token);
  static CellId from_face_ij_wrap(int face, int64_t i, int64_t j);

  uint64_t raw() const { return id_; }
  bool is_valid() const;
  int face() const { return static_cast<int>(id_ >> kPosBits); }
  int level() const;
  bool is_leaf() const { return id_ & 1; }
  bool is_face() const { return (id_ & (lsb_for_level(0) - 1)) == 0; }

  /// Lowest set bit; encodes the level.
  uint64_t lsb() const { return id_ & (~id_ + 1); }
  static constexpr uint64_t lsb_for_level(int level) {
    return uint64_t{1} << (2 * (kMaxCellLevel - level));
  }

  CellId parent(int level) const;
  CellId parent() const { return parent(level() - 1); }
  CellId child(int k) const;
  std::array<CellId, 4> children() const;

  /// First and last leaf ids covered by this cell (inclusive).
  CellId range_min() const { return CellId(id_ - (lsb() - 1)); }
  CellId range_max() const { return CellId(id_ + (lsb() - 1)); }
  bool contains(CellId other) const {
    return other.id_ >= range_min().id_ && other.id_ <= range_max().id_;
  }
  bool intersects(CellId other) const {
    return other.range_min().id_ <= range_max().id_ &&
           other.range_max().id_ >= range_min().id_;
  }

  /// Next/previous cell at this level along the Hilbert curve.
  CellId next() const { return CellId(id_ + (lsb() << 1)); }
  CellId prev() const { return CellId(id_ - (lsb() << 1)); }

  /// First descendant at `level` (the start of this cell's subtree).
  CellId child_begin(int level) const {
    return CellId(id_ - lsb() + lsb_for_level(level));
  }
  /// One past the last descendant at `level`.
  CellId child_end(int level) const {
    return CellId(id_ + lsb() + lsb_for_level(level));
  }

  /// The four same-level cells sharing an edge, correct across faces.
  std::array<CellId, 4> edge_neighbors() const;

  /// Lowercase hex of the id with trailing zeros stripped.
  std::string token() const;

  FaceIJ to_face_ij() const;
  int to_face_ij(uint32_t* i, uint32_t* j, int* orientation) const;

  /// Cell center on the unit sphere.
  Vec3 center() const;
  LatLng center_latlng() const { return LatLng::from_point(center()); }

  /// The four corners in counterclockwise order, as unit vectors.
  std::array<Vec3, 4> vertices() const;

  /// (u,v) bounds of the cell on its face.
  void uv_bounds(double* u_lo, double* u_hi, double* v_lo, double* v_hi) const;

  /// Exact spherical quadrilateral area.
  double area_sr() const;
  double area_km2() const { return area_sr() * kEarthRadiusKm * kEarthRadiusKm; }

  friend auto operator<=>(const CellId& a, const CellId& b) = default;

 private:
  uint64_t id_;
};

/// Mean cell area at a level: the sphere divided evenly among 6*4^level cells.
double average_area_sr(int level);
double average_area_km2(int level);

// Cube-face projection. `st_to_uv` is the quadratic transform that keeps
// cell areas within a small factor of each other across a face.
double st_to_uv(double s);
double uv_to_st(double u);
double ij_to_st_min(uint32_t i);
uint32_t st_to_ij(double s);

Vec3 face_uv_to_xyz(int face, double u, double v);
int xyz_to_face(const Vec3& p);
void valid_face_xyz_to_uv(int face, const Vec3& p, double* u, double* v);
int xyz_to_face_uv(const Vec3& p, double* u, double* v);

// Face frame: outward axis and the two uv coordinate axes.
Vec3 face_axis(int face);
Vec3 face_u_axis(int face);
Vec3 face_v_axis(int face);

}  // namespace geogrid
