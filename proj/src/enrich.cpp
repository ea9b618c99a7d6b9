#include "geogrid/enrich.hpp"

#include <algorithm>
#include <set>

#include "geogrid/error.hpp"
#include "geogrid/sphere.hpp"

namespace geogrid {

namespace {

// Intersection areas below this are boundary coincidences, not overlaps.
constexpr double kTouchAreaFloorSr = 1e-12;

void emit_pair(std::vector<RelationRecord>* out, const EntityRef& a,
               Relation r, const EntityRef& b) {
  out->push_back({a, r, b, Provenance::precomputed});
  out->push_back({b, inverse(r), a, Provenance::precomputed});
}

}  // namespace

const char* to_string(Relation r) {
  switch (r) {
    case Relation::sf_within: return "sfWithin";
    case Relation::sf_contains: return "sfContains";
    case Relation::sf_touches: return "sfTouches";
    case Relation::sf_overlaps: return "sfOverlaps";
    case Relation::sf_crosses: return "sfCrosses";
  }
  return "?";
}

Relation relation_from_string(std::string_view s) {
  if (s == "sfWithin") return Relation::sf_within;
  if (s == "sfContains") return Relation::sf_contains;
  if (s == "sfTouches") return Relation::sf_touches;
  if (s == "sfOverlaps") return Relation::sf_overlaps;
  if (s == "sfCrosses") return Relation::sf_crosses;
  if (s == "sfEquals" || s == "sfDisjoint") {
    throw Error(std::string(s) + " is not materialized");
  }
  throw Error("unknown relation: " + std::string(s));
}

Relation inverse(Relation r) {
  switch (r) {
    case Relation::sf_within: return Relation::sf_contains;
    case Relation::sf_contains: return Relation::sf_within;
    default: return r;  // symmetric
  }
}

std::string EntityRef::label() const {
  return is_cell() ? "cell:" + cell.token() : "feat:" + feature_id;
}

EntityRef EntityRef::from_label(std::string_view label) {
  if (label.rfind("cell:", 0) == 0) {
    auto c = CellId::from_token(label.substr(5));
    if (!c) throw Error("bad cell token in label: " + std::string(label));
    return of_cell(*c);
  }
  if (label.rfind("feat:", 0) == 0) {
    return of_feature(std::string(label.substr(5)));
  }
  throw Error("bad entity label: " + std::string(label));
}

std::string to_tsv(const RelationRecord& r) {
  return r.subject.label() + "\t" + to_string(r.relation) + "\t" +
         r.object.label() + "\t" +
         (r.provenance == Provenance::precomputed ? "precomputed" : "inferred");
}

RelationRecord record_from_tsv(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  if (fields.size() < 3) throw Error("bad record line");
  RelationRecord rec;
  rec.subject = EntityRef::from_label(fields[0]);
  rec.relation = relation_from_string(fields[1]);
  rec.object = EntityRef::from_label(fields[2]);
  if (fields.size() >= 4 && fields[3] == "inferred") {
    rec.provenance = Provenance::inferred;
  }
  return rec;
}

Feature make_feature(std::string id, WktGeometry geometry) {
  Feature f;
  f.id = std::move(id);
  switch (geometry.kind) {
    case WktGeometry::Kind::point:
    case WktGeometry::Kind::multi_point: f.kind = 'P'; break;
    case WktGeometry::Kind::line_string:
    case WktGeometry::Kind::multi_line_string: f.kind = 'L'; break;
    case WktGeometry::Kind::polygon:
    case WktGeometry::Kind::multi_polygon: f.kind = 'A'; break;
  }
  f.geometry = std::move(geometry);
  return f;
}

namespace {

std::vector<RelationRecord> enrich_points(const Feature& f, int level) {
  std::vector<RelationRecord> out;
  std::set<CellId> cells;
  for (const LatLng& p : f.geometry.points) {
    cells.insert(CellId::from_latlng(p, level));
  }
  EntityRef feat = EntityRef::of_feature(f.id);
  for (CellId c : cells) {
    emit_pair(&out, EntityRef::of_cell(c), Relation::sf_contains, feat);
  }
  return out;
}

std::vector<RelationRecord> enrich_lines(const Feature& f, int level,
                                         double step) {
  std::vector<GeodesicChain> chains = to_chains(f.geometry, step);
  std::set<CellId> cells;
  for (const GeodesicChain& chain : chains) {
    Region region(chain);
    HomogeneousStream stream(region, level, false, /*include_touches=*/true);
    while (auto c = stream.next()) cells.insert(*c);
  }
  std::vector<RelationRecord> out;
  EntityRef feat = EntityRef::of_feature(f.id);
  for (CellId c : cells) {
    bool interior = false, outside = false, touch = false;
    for (const GeodesicChain& chain : chains) {
      switch (relate_cell(chain, c)) {
        case CellRelation::within_cell: interior = true; break;
        case CellRelation::crosses: interior = true; outside = true; break;
        case CellRelation::touches: touch = true; outside = true; break;
        case CellRelation::disjoint: outside = true; break;
        default: break;
      }
    }
    EntityRef cell = EntityRef::of_cell(c);
    if (interior && outside) {
      // One-way: the curve crosses the surface.
      out.push_back({feat, Relation::sf_crosses, cell, Provenance::precomputed});
    } else if (interior) {
      emit_pair(&out, feat, Relation::sf_within, cell);
    } else if (touch) {
      emit_pair(&out, feat, Relation::sf_touches, cell);
    }
  }
  return out;
}

void emit_areal_cell(const MultiPolygon& poly, CellId c, const EntityRef& feat,
                     std::vector<RelationRecord>* out) {
  EntityRef cell = EntityRef::of_cell(c);
  CellGeom geom(c);
  bool contains = false, within = !poly.parts.empty();
  for (const auto& part : poly.parts) {
    if (polygon_contains_cell(part, geom)) contains = true;
    if (!polygon_within_cell(part, geom)) within = false;
  }
  if (contains && within) {
    // Exact feature/cell equality: both containment directions, never
    // sfEquals.
    emit_pair(out, feat, Relation::sf_contains, cell);
    emit_pair(out, feat, Relation::sf_within, cell);
    return;
  }
  if (contains) {
    emit_pair(out, feat, Relation::sf_contains, cell);
    return;
  }
  if (within) {
    emit_pair(out, feat, Relation::sf_within, cell);
    return;
  }
  switch (relate_cell(poly, c)) {
    case CellRelation::touches:
      emit_pair(out, feat, Relation::sf_touches, cell);
      break;
    case CellRelation::disjoint:
      break;
    default: {
      double area = overlap_area_sr(poly, geom);
      emit_pair(out, feat,
                area < kTouchAreaFloorSr ? Relation::sf_touches
                                         : Relation::sf_overlaps,
                cell);
    }
  }
}

std::vector<RelationRecord> enrich_areal(const Feature& f, int level,
                                         double step) {
  MultiPolygon poly = to_spherical(f.geometry, step);
  std::vector<RelationRecord> out;
  EntityRef feat = EntityRef::of_feature(f.id);
  // Descend the hierarchy; a fully contained subtree needs no further
  // geometry tests, its reference-level cells are all sfContains.
  std::vector<CellId> stack;
  for (int face = kNumFaces - 1; face >= 0; --face) {
    stack.push_back(CellId::from_face(face));
  }
  while (!stack.empty()) {
    CellId c = stack.back();
    stack.pop_back();
    CellRelation r = relate_cell(poly, c);
    if (r == CellRelation::disjoint) continue;
    if (c.level() == level) {
      emit_areal_cell(poly, c, feat, &out);
      continue;
    }
    if (r == CellRelation::contains_cell) {
      for (CellId ref = c.child_begin(level); ref < c.child_end(level);
           ref = ref.next()) {
        emit_pair(&out, feat, Relation::sf_contains, EntityRef::of_cell(ref));
      }
      continue;
    }
    for (int k = 3; k >= 0; --k) stack.push_back(c.child(k));
  }
  return out;
}

}  // namespace

std::vector<RelationRecord> enrich_feature(const Feature& f,
                                           const ReferenceGrid& grid,
                                           double densify_step_deg) {
  if (grid.level < 0 || grid.level > kMaxCellLevel) throw Error("bad level");
  switch (f.kind) {
    case 'P': return enrich_points(f, grid.level);
    case 'L': return enrich_lines(f, grid.level, densify_step_deg);
    case 'A': return enrich_areal(f, grid.level, densify_step_deg);
    default: throw Error("unsupported geometry kind");
  }
}

std::vector<RelationRecord> enrich_compressed(const Feature& f,
                                              const CompressedParams& params,
                                              double densify_step_deg) {
  if (f.kind != 'A') throw Error("compressed enrichment needs an areal feature");
  if (params.min_level >= params.max_level) {
    throw Error("min_level must be below max_level");
  }
  MultiPolygon poly = to_spherical(f.geometry, densify_step_deg);
  EntityRef feat = EntityRef::of_feature(f.id);
  std::vector<RelationRecord> out;

  auto emit_overlap_here = [&](int level) {
    return !params.boundary_level.has_value() || *params.boundary_level == level;
  };

  // Exhaustive descent: stop at the largest fully-contained cells so the
  // reference-level containment set is exactly implied by transitivity.
  std::vector<CellId> stack;
  for (int face = kNumFaces - 1; face >= 0; --face) {
    stack.push_back(CellId::from_face(face));
  }
  while (!stack.empty()) {
    CellId c = stack.back();
    stack.pop_back();
    int level = c.level();
    CellRelation r = relate_cell(poly, c);
    if (r == CellRelation::disjoint) continue;
    if (level < params.min_level) {
      for (int k = 3; k >= 0; --k) stack.push_back(c.child(k));
      continue;
    }
    EntityRef cell = EntityRef::of_cell(c);
    switch (r) {
      case CellRelation::contains_cell:
        emit_pair(&out, feat, Relation::sf_contains, cell);
        break;  // largest fitting cell; transitivity implies the rest
      case CellRelation::within_cell:
        emit_pair(&out, feat, Relation::sf_within, cell);
        if (level < params.max_level) {
          for (int k = 3; k >= 0; --k) stack.push_back(c.child(k));
        }
        break;
      case CellRelation::touches:
        emit_pair(&out, feat, Relation::sf_touches, cell);
        break;
      default: {
        CellGeom geom(c);
        double area = overlap_area_sr(poly, geom);
        if (area < kTouchAreaFloorSr) {
          emit_pair(&out, feat, Relation::sf_touches, cell);
          break;
        }
        if (emit_overlap_here(level)) {
          emit_pair(&out, feat, Relation::sf_overlaps, cell);
        }
        if (level < params.max_level) {
          for (int k = 3; k >= 0; --k) stack.push_back(c.child(k));
        }
      }
    }
  }
  return out;
}

std::vector<RelationRecord> cell_hierarchy_records(
    const std::vector<CellId>& covering_cells) {
  std::vector<RelationRecord> out;
  std::set<CellId> in_region(covering_cells.begin(), covering_cells.end());
  for (CellId c : covering_cells) {
    EntityRef parent = EntityRef::of_cell(c);
    if (!c.is_leaf()) {
      for (CellId kid : c.children()) {
        emit_pair(&out, parent, Relation::sf_contains, EntityRef::of_cell(kid));
      }
    }
    for (CellId n : c.edge_neighbors()) {
      if (in_region.count(n)) {
        out.push_back({parent, Relation::sf_touches, EntityRef::of_cell(n),
                       Provenance::precomputed});
      }
    }
  }
  return out;
}

}  // namespace geogrid
