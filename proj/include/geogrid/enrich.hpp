#pragma once

#include <optional>
#include <string>
#include <vector>

#include "geogrid/cell.hpp"
#include "geogrid/coverer.hpp"
#include "geogrid/wkt.hpp"

namespace geogrid {

/// Materializable topological relations. sfEquals and sfDisjoint are never
/// emitted; sfIntersects is derivable as the superproperty of the rest and
/// is not materialized either.
enum class Relation {
  sf_within,
  sf_contains,
  sf_touches,
  sf_overlaps,
  sf_crosses,
};

const char* to_string(Relation r);
Relation relation_from_string(std::string_view s);

/// Inverse counterpart under argument swap (within <-> contains; the
/// symmetric relations map to themselves).
Relation inverse(Relation r);

enum class Provenance { precomputed, inferred };

/// A feature or a grid cell, as a relation endpoint.
struct EntityRef {
  enum class Kind { feature, cell };
  Kind kind = Kind::feature;
  std::string feature_id;
  CellId cell;

  static EntityRef of_feature(std::string id) {
    return {Kind::feature, std::move(id), CellId()};
  }
  static EntityRef of_cell(CellId c) { return {Kind::cell, {}, c}; }

  bool is_cell() const { return kind == Kind::cell; }
  std::string label() const;
  static EntityRef from_label(std::string_view label);

  friend bool operator==(const EntityRef& a, const EntityRef& b) {
    return a.kind == b.kind && a.feature_id == b.feature_id &&
           a.cell == b.cell;
  }
};

struct RelationRecord {
  EntityRef subject;
  Relation relation = Relation::sf_within;
  EntityRef object;
  Provenance provenance = Provenance::precomputed;

  friend bool operator==(const RelationRecord&, const RelationRecord&) = default;
};

std::string to_tsv(const RelationRecord& r);
RelationRecord record_from_tsv(std::string_view line);

/// Geometry-bearing entity to enrich. `kind` is the DE-9IM geometry class:
/// 'P' point, 'L' curve, 'A' surface.
struct Feature {
  std::string id;
  WktGeometry geometry;
  char kind = 'P';
};

Feature make_feature(std::string id, WktGeometry geometry);

/// The fixed-level grid relations are computed against.
struct ReferenceGrid {
  int level = 13;
};

/// Classic enrichment: DE-9IM records between one feature and every
/// reference cell its geometry intersects or touches. Inverse and
/// symmetric counterparts are emitted eagerly.
std::vector<RelationRecord> enrich_feature(
    const Feature& f, const ReferenceGrid& grid,
    double densify_step_deg = kDefaultDensifyStepDeg);

struct CompressedParams {
  int min_level = 3;
  int max_level = 13;
  /// When set, sfOverlaps records are only emitted for partially
  /// overlapping cells at this single level; by default every level of the
  /// descent emits them.
  std::optional<int> boundary_level;
};

/// Compressed enrichment for large polygons: containment is recorded on
/// the largest cells that fit, and the fine-level containment set is
/// implied through sfWithin transitivity over the cell hierarchy.
std::vector<RelationRecord> enrich_compressed(
    const Feature& f, const CompressedParams& params,
    double densify_step_deg = kDefaultDensifyStepDeg);

/// One-step hierarchy records for every cell of a covering (4 sfContains +
/// 4 sfWithin per cell) plus symmetric sfTouches pairs between covering
/// cells that are edge neighbors. Multi-level connectivity is left to
/// transitive closure.
std::vector<RelationRecord> cell_hierarchy_records(
    const std::vector<CellId>& covering_cells);

}  // namespace geogrid
