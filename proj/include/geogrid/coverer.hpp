#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "geogrid/cell.hpp"
#include "geogrid/sphere.hpp"

namespace geogrid {

struct CoveringParams {
  enum class Mode { ordinary, homogeneous, interior };

  int min_level = 0;
  int max_level = kMaxCellLevel;
  int max_cells = 8;  // soft cap honored strictly; min_level is best effort
  Mode mode = Mode::ordinary;

  void validate() const;
};

/// Any geometry a covering can be built for.
class Region {
 public:
  Region(const Vec3& point) : geom_(point) {}
  Region(GeodesicChain chain) : geom_(std::move(chain)) {}
  Region(SphericalPolygon poly) : geom_(std::move(poly)) {}
  Region(MultiPolygon poly) : geom_(std::move(poly)) {}

  CellRelation relate(CellId c) const;

  /// Region contains the whole cell.
  bool contains_cell(CellId c) const {
    return relate(c) == CellRelation::contains_cell;
  }
  bool is_areal() const;
  bool empty() const;

 private:
  std::variant<Vec3, GeodesicChain, SphericalPolygon, MultiPolygon> geom_;
};

/// Sorted, non-overlapping cell set approximating a region. No cell in the
/// list is an ancestor of another.
struct Covering {
  std::vector<CellId> cells;
  CoveringParams params;

  /// True if some covering cell is an ancestor of (or equal to) c.
  bool covers(CellId c) const;
};

/// Sort, remove descendants of present ancestors, and merge complete
/// sibling quadruples (not coarser than min_level).
void normalize_covering(std::vector<CellId>* cells, int min_level = 0);

/// Build a covering per params.mode. Ordinary coverings are supersets of
/// the region; interior coverings are subsets; homogeneous coverings hold
/// every intersecting cell of the fixed level (min_level == max_level).
Covering covering(const Region& region, const CoveringParams& params);

/// Greedy maximal interior covering under params.max_cells.
Covering interior_covering(const Region& region, CoveringParams params);

/// Fixed-level cells intersecting the region. Unbounded by max_cells.
std::vector<CellId> homogeneous_covering(const Region& region, int level);

/// Fixed-level cells partially overlapping the region: the homogeneous
/// covering minus the cells the region fully contains.
Covering boundary_cells(const Region& region, int level);

/// Pull-based enumeration of a fixed-level covering in id order, for
/// continental-scale regions where materializing the list is wasteful.
/// Single-consumer. Cells whose only contact is a shared boundary are
/// skipped unless `include_touches` is set: a covering is about interior
/// intersection, while enrichment also wants the zero-area contacts.
class HomogeneousStream {
 public:
  HomogeneousStream(const Region& region, int level, bool boundary_only = false,
                    bool include_touches = false);
  HomogeneousStream(Region&&, int, bool = false, bool = false) = delete;
  std::optional<CellId> next();

 private:
  const Region& region_;
  int level_;
  bool boundary_only_;
  bool include_touches_;
  std::vector<CellId> stack_;
  CellId range_cur_, range_end_;
  bool in_range_ = false;
};

}  // namespace geogrid
