#include "geogrid/cell.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "geogrid/error.hpp"

namespace geogrid {

namespace {

constexpr int kLookupBits = 4;
constexpr uint32_t kSwapMask = 0x01;
constexpr uint32_t kInvertMask = 0x02;

// Hilbert curve base orderings: the traversal order of the four quadrants
// for each of the four orientations of the curve.
constexpr int kPosToIJ[4][4] = {
    {0, 1, 3, 2},
    {0, 2, 3, 1},
    {3, 2, 0, 1},
    {3, 1, 0, 2},
};
constexpr uint32_t kPosToOrientation[4] = {kSwapMask, 0, 0,
                                           kInvertMask | kSwapMask};

// Precomputed 4-level expansions: a 10-bit key "iiiijjjjoo" maps to
// "ppppppppoo" (and back) so encoding walks 4 levels per step.
struct LookupTables {
  uint16_t pos[1 << (2 * kLookupBits + 2)];
  uint16_t ij[1 << (2 * kLookupBits + 2)];

  LookupTables() {
    init(0, 0, 0, 0, 0, 0);
    init(0, 0, 0, kSwapMask, 0, kSwapMask);
    init(0, 0, 0, kInvertMask, 0, kInvertMask);
    init(0, 0, 0, kSwapMask | kInvertMask, 0, kSwapMask | kInvertMask);
  }

  void init(int level, uint32_t i, uint32_t j, uint32_t orig_orientation,
            uint32_t position, uint32_t orientation) {
    if (level == kLookupBits) {
      uint32_t ij_key = (i << kLookupBits) + j;
      pos[(ij_key << 2) + orig_orientation] =
          static_cast<uint16_t>((position << 2) + orientation);
      ij[(position << 2) + orig_orientation] =
          static_cast<uint16_t>((ij_key << 2) + orientation);
    } else {
      level++;
      i <<= 1;
      j <<= 1;
      position <<= 2;
      const int* r = kPosToIJ[orientation];
      for (uint32_t index = 0; index < 4; ++index) {
        init(level, i + (r[index] >> 1), j + (r[index] & 1), orig_orientation,
             position + index, orientation ^ kPosToOrientation[index]);
      }
    }
  }
};

const LookupTables& tables() {
  static const LookupTables t;
  return t;
}

constexpr double kPi = 3.14159265358979323846;

int largest_abs_component(const Vec3& p) {
  const Vec3 a = p.cwiseAbs();
  return a.x() > a.y() ? (a.x() > a.z() ? 0 : 2) : (a.y() > a.z() ? 1 : 2);
}

}  // namespace

LatLng::LatLng(double lat_deg, double lng_deg) : lat_(lat_deg), lng_(lng_deg) {
  if (!(lat_ >= -90.0 && lat_ <= 90.0)) {
    throw Error("latitude out of range: " + std::to_string(lat_deg));
  }
  if (!(lng_ >= -180.0 && lng_ <= 180.0)) {
    throw Error("longitude out of range: " + std::to_string(lng_deg));
  }
  if (lng_ == -180.0) lng_ = 180.0;
}

Vec3 LatLng::to_point() const {
  double phi = lat_ * kPi / 180.0;
  double theta = lng_ * kPi / 180.0;
  double cos_phi = std::cos(phi);
  return Vec3(std::cos(theta) * cos_phi, std::sin(theta) * cos_phi,
              std::sin(phi));
}

LatLng LatLng::from_point(const Vec3& p) {
  double lat = std::atan2(p.z(), std::hypot(p.x(), p.y())) * 180.0 / kPi;
  double lng = std::atan2(p.y(), p.x()) * 180.0 / kPi;
  return LatLng(std::clamp(lat, -90.0, 90.0), std::clamp(lng, -180.0, 180.0));
}

double st_to_uv(double s) {
  if (s >= 0.5) return (1.0 / 3.0) * (4 * s * s - 1);
  return (1.0 / 3.0) * (1 - 4 * (1 - s) * (1 - s));
}

double uv_to_st(double u) {
  if (u >= 0) return 0.5 * std::sqrt(1 + 3 * u);
  return 1 - 0.5 * std::sqrt(1 - 3 * u);
}

double ij_to_st_min(uint32_t i) {
  return static_cast<double>(i) / kLimitIJ;
}

uint32_t st_to_ij(double s) {
  // Points exactly on a leaf boundary resolve downward (floor rule).
  double scaled = std::floor(kLimitIJ * s);
  double clamped = std::clamp(scaled, 0.0, static_cast<double>(kLimitIJ - 1));
  return static_cast<uint32_t>(clamped);
}

Vec3 face_uv_to_xyz(int face, double u, double v) {
  switch (face) {
    case 0: return Vec3(1, u, v);
    case 1: return Vec3(-u, 1, v);
    case 2: return Vec3(-u, -v, 1);
    case 3: return Vec3(-1, -v, -u);
    case 4: return Vec3(v, -1, -u);
    default: return Vec3(v, u, -1);
  }
}

Vec3 face_axis(int face) { return face_uv_to_xyz(face, 0, 0); }

Vec3 face_u_axis(int face) {
  switch (face) {
    case 0: return Vec3(0, 1, 0);
    case 1: return Vec3(-1, 0, 0);
    case 2: return Vec3(-1, 0, 0);
    case 3: return Vec3(0, 0, -1);
    case 4: return Vec3(0, 0, -1);
    default: return Vec3(0, 1, 0);
  }
}

Vec3 face_v_axis(int face) {
  switch (face) {
    case 0: return Vec3(0, 0, 1);
    case 1: return Vec3(0, 0, 1);
    case 2: return Vec3(0, -1, 0);
    case 3: return Vec3(0, -1, 0);
    case 4: return Vec3(1, 0, 0);
    default: return Vec3(1, 0, 0);
  }
}

int xyz_to_face(const Vec3& p) {
  int face = largest_abs_component(p);
  if (p[face] < 0) face += 3;
  return face;
}

void valid_face_xyz_to_uv(int face, const Vec3& p, double* u, double* v) {
  switch (face) {
    case 0: *u = p.y() / p.x(); *v = p.z() / p.x(); break;
    case 1: *u = -p.x() / p.y(); *v = p.z() / p.y(); break;
    case 2: *u = -p.x() / p.z(); *v = -p.y() / p.z(); break;
    case 3: *u = p.z() / p.x(); *v = p.y() / p.x(); break;
    case 4: *u = p.z() / p.y(); *v = -p.x() / p.y(); break;
    default: *u = -p.y() / p.z(); *v = -p.x() / p.z(); break;
  }
}

int xyz_to_face_uv(const Vec3& p, double* u, double* v) {
  int face = xyz_to_face(p);
  valid_face_xyz_to_uv(face, p, u, v);
  return face;
}

CellId CellId::from_face(int face) {
  if (face < 0 || face >= kNumFaces) throw Error("invalid face");
  return CellId((uint64_t{static_cast<uint64_t>(face)} << kPosBits) +
                lsb_for_level(0));
}

CellId CellId::from_face_ij(int face, uint32_t i, uint32_t j) {
  uint64_t n = static_cast<uint64_t>(face) << (kPosBits - 1);
  uint32_t bits = face & kSwapMask;
  const LookupTables& t = tables();
  for (int k = 7; k >= 0; --k) {
    const uint32_t mask = (1 << kLookupBits) - 1;
    bits += ((i >> (k * kLookupBits)) & mask) << (kLookupBits + 2);
    bits += ((j >> (k * kLookupBits)) & mask) << 2;
    bits = t.pos[bits];
    n |= static_cast<uint64_t>(bits >> 2) << (k * 2 * kLookupBits);
    bits &= (kSwapMask | kInvertMask);
  }
  return CellId(n * 2 + 1);
}

int CellId::to_face_ij(uint32_t* pi, uint32_t* pj, int* orientation) const {
  uint32_t i = 0, j = 0;
  int face = this->face();
  uint32_t bits = face & kSwapMask;
  const LookupTables& t = tables();
  for (int k = 7; k >= 0; --k) {
    const int nbits = (k == 7) ? (kMaxCellLevel - 7 * kLookupBits) : kLookupBits;
    bits += (static_cast<uint32_t>(id_ >> (k * 2 * kLookupBits + 1)) &
             ((1 << (2 * nbits)) - 1))
            << 2;
    bits = t.ij[bits];
    i += (bits >> (kLookupBits + 2)) << (k * kLookupBits);
    j += ((bits >> 2) & ((1 << kLookupBits) - 1)) << (k * kLookupBits);
    bits &= (kSwapMask | kInvertMask);
  }
  if (orientation != nullptr) {
    // The curve orientation at odd levels carries an extra axis swap.
    if (lsb() & UINT64_C(0x1111111111111110)) bits ^= kSwapMask;
    *orientation = static_cast<int>(bits);
  }
  *pi = i;
  *pj = j;
  return face;
}

FaceIJ CellId::to_face_ij() const {
  FaceIJ out;
  uint32_t i, j;
  int orientation;
  out.face = to_face_ij(&i, &j, &orientation);
  out.i = i;
  out.j = j;
  out.orientation = orientation;
  return out;
}

CellId CellId::from_latlng(const LatLng& ll, int level) {
  return from_point(ll.to_point(), level);
}

CellId CellId::from_point(const Vec3& p, int level) {
  if (level < 0 || level > kMaxCellLevel) throw Error("invalid level");
  double u, v;
  int face = xyz_to_face_uv(p, &u, &v);
  uint32_t i = st_to_ij(uv_to_st(u));
  uint32_t j = st_to_ij(uv_to_st(v));
  return from_face_ij(face, i, j).parent(level);
}

bool CellId::is_valid() const {
  return id_ != 0 && face() < kNumFaces &&
         (lsb() & UINT64_C(0x1555555555555555));
}

int CellId::level() const {
  return kMaxCellLevel - (std::countr_zero(id_) >> 1);
}

CellId CellId::parent(int level) const {
  if (level < 0 || level > this->level()) {
    throw Error("parent level " + std::to_string(level) +
                " below cell level " + std::to_string(this->level()));
  }
  uint64_t new_lsb = lsb_for_level(level);
  return CellId((id_ & (~new_lsb + 1)) | new_lsb);
}

CellId CellId::child(int k) const {
  if (is_leaf()) throw Error("leaf cell has no children");
  uint64_t quarter = lsb() >> 2;
  return CellId(id_ - lsb() + (2 * static_cast<uint64_t>(k) + 1) * quarter);
}

std::array<CellId, 4> CellId::children() const {
  return {child(0), child(1), child(2), child(3)};
}

CellId CellId::from_face_ij_wrap(int face, int64_t i, int64_t j) {
  // Clamp to just beyond the face so the projection lands on the correct
  // neighboring face, then re-derive (face,i,j) through uv space. The
  // linear u=2s-1 projection is its own inverse here.
  i = std::clamp<int64_t>(i, -1, kLimitIJ);
  j = std::clamp<int64_t>(j, -1, kLimitIJ);

  static const double kScale = 1.0 / kLimitIJ;
  static const double kLimit = 1.0 + 2.220446049250313e-16;
  double u = std::max(-kLimit, std::min(kLimit, kScale * (2 * (i - static_cast<int64_t>(kLimitIJ) / 2) + 1)));
  double v = std::max(-kLimit, std::min(kLimit, kScale * (2 * (j - static_cast<int64_t>(kLimitIJ) / 2) + 1)));

  int nface = xyz_to_face_uv(face_uv_to_xyz(face, u, v), &u, &v);
  return from_face_ij(nface, st_to_ij(0.5 * (u + 1)), st_to_ij(0.5 * (v + 1)));
}

namespace {

CellId from_face_ij_same(int face, int64_t i, int64_t j, bool same_face) {
  if (same_face) {
    return CellId::from_face_ij(face, static_cast<uint32_t>(i),
                                static_cast<uint32_t>(j));
  }
  return CellId::from_face_ij_wrap(face, i, j);
}

}  // namespace

std::array<CellId, 4> CellId::edge_neighbors() const {
  uint32_t i, j;
  int level = this->level();
  int64_t size = int64_t{1} << (kMaxCellLevel - level);
  int face = to_face_ij(&i, &j, nullptr);
  int64_t si = i, sj = j;

  // Down, right, up, left.
  return {
      from_face_ij_same(face, si, sj - size, sj - size >= 0).parent(level),
      from_face_ij_same(face, si + size, sj, si + size < kLimitIJ).parent(level),
      from_face_ij_same(face, si, sj + size, sj + size < kLimitIJ).parent(level),
      from_face_ij_same(face, si - size, sj, si - size >= 0).parent(level),
  };
}

std::string CellId::token() const {
  if (id_ == 0) return "X";
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(id_));
  std::string s(buf);
  size_t last = s.find_last_not_of('0');
  return s.substr(0, last + 1);
}

std::optional<CellId> CellId::from_token(std::string_view token) {
  if (token.empty() || token.size() > 16) return std::nullopt;
  uint64_t id = 0;
  for (char c : token) {
    int digit;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
    else return std::nullopt;
    id = (id << 4) | static_cast<uint64_t>(digit);
  }
  id <<= 4 * (16 - token.size());
  CellId cell(id);
  if (!cell.is_valid()) return std::nullopt;
  return cell;
}

Vec3 CellId::center() const {
  uint32_t i, j;
  int face = to_face_ij(&i, &j, nullptr);
  // The trailing id bits decode to a leaf just off-center; delta moves to
  // the true center in si/ti (half-leaf) units.
  uint32_t delta =
      is_leaf() ? 1 : (((i ^ (static_cast<uint32_t>(id_) >> 2)) & 1) ? 2 : 0);
  uint64_t si = 2 * static_cast<uint64_t>(i) + delta;
  uint64_t ti = 2 * static_cast<uint64_t>(j) + delta;
  double s = static_cast<double>(si) / (2.0 * kLimitIJ);
  double t = static_cast<double>(ti) / (2.0 * kLimitIJ);
  return face_uv_to_xyz(face, st_to_uv(s), st_to_uv(t)).normalized();
}

void CellId::uv_bounds(double* u_lo, double* u_hi, double* v_lo,
                       double* v_hi) const {
  uint32_t i, j;
  int level = this->level();
  to_face_ij(&i, &j, nullptr);
  uint32_t size = uint32_t{1} << (kMaxCellLevel - level);
  uint32_t i_lo = i & ~(size - 1);
  uint32_t j_lo = j & ~(size - 1);
  *u_lo = st_to_uv(ij_to_st_min(i_lo));
  *u_hi = st_to_uv(ij_to_st_min(i_lo + size));
  *v_lo = st_to_uv(ij_to_st_min(j_lo));
  *v_hi = st_to_uv(ij_to_st_min(j_lo + size));
}

std::array<Vec3, 4> CellId::vertices() const {
  double u0, u1, v0, v1;
  uv_bounds(&u0, &u1, &v0, &v1);
  int f = face();
  return {
      face_uv_to_xyz(f, u0, v0).normalized(),
      face_uv_to_xyz(f, u1, v0).normalized(),
      face_uv_to_xyz(f, u1, v1).normalized(),
      face_uv_to_xyz(f, u0, v1).normalized(),
  };
}

namespace {

// Signed area of a spherical triangle (van Oosterom & Strackee).
double signed_triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  double num = a.dot(b.cross(c));
  double den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace

double CellId::area_sr() const {
  std::array<Vec3, 4> v = vertices();
  return signed_triangle_area(v[0], v[1], v[2]) +
         signed_triangle_area(v[0], v[2], v[3]);
}

double average_area_sr(int level) {
  if (level < 0 || level > kMaxCellLevel) throw Error("invalid level");
  return 4.0 * kPi / (6.0 * std::pow(4.0, level));
}

double average_area_km2(int level) {
  return average_area_sr(level) * kEarthRadiusKm * kEarthRadiusKm;
}

}  // namespace geogrid
