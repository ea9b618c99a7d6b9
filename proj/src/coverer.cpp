#include "geogrid/coverer.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "geogrid/error.hpp"

namespace geogrid {

void CoveringParams::validate() const {
  if (min_level < 0 || max_level > kMaxCellLevel || min_level > max_level) {
    throw Error("invalid covering levels");
  }
  if (max_cells < 1) throw Error("max_cells must be positive");
  if (mode == Mode::homogeneous && min_level != max_level) {
    throw Error("homogeneous mode requires min_level == max_level");
  }
}

CellRelation Region::relate(CellId c) const {
  return std::visit([&](const auto& g) { return relate_cell(g, c); }, geom_);
}

bool Region::is_areal() const {
  return std::holds_alternative<SphericalPolygon>(geom_) ||
         std::holds_alternative<MultiPolygon>(geom_);
}

bool Region::empty() const {
  if (const auto* m = std::get_if<MultiPolygon>(&geom_)) {
    return m->parts.empty();
  }
  if (const auto* p = std::get_if<SphericalPolygon>(&geom_)) {
    return p->empty();
  }
  return false;
}

bool Covering::covers(CellId c) const {
  auto it = std::upper_bound(cells.begin(), cells.end(), c);
  if (it != cells.end() && it->contains(c)) return true;
  if (it != cells.begin() && std::prev(it)->contains(c)) return true;
  return false;
}

void normalize_covering(std::vector<CellId>* cells, int min_level) {
  std::sort(cells->begin(), cells->end());
  std::vector<CellId> out;
  out.reserve(cells->size());
  for (CellId c : *cells) {
    if (!out.empty() && out.back().contains(c)) continue;
    if (!out.empty() && c.contains(out.back())) out.pop_back();
    out.push_back(c);
    // Merge complete sibling runs, cascading upward.
    while (out.size() >= 4) {
      size_t n = out.size();
      CellId last = out[n - 1];
      if (last.is_face() || last.level() <= min_level) break;
      CellId parent = last.parent();
      bool siblings = true;
      for (int k = 0; k < 4; ++k) {
        if (out[n - 4 + k] != parent.child(k)) {
          siblings = false;
          break;
        }
      }
      if (!siblings) break;
      out.resize(n - 4);
      out.push_back(parent);
    }
  }
  *cells = std::move(out);
}

namespace {

struct Candidate {
  CellId cell;
  int level;
  int intersecting_children;  // computed lazily at expansion time

  // Expand big cells first; among equals prefer the one whose subdivision
  // prunes the most, then id order for determinism.
  bool operator<(const Candidate& other) const {
    if (level != other.level) return level > other.level;  // min-heap on level
    if (intersecting_children != other.intersecting_children) {
      return intersecting_children < other.intersecting_children;
    }
    return cell.raw() > other.cell.raw();
  }
};

int count_intersecting_children(const Region& region, CellId c) {
  if (c.is_leaf()) return 0;
  int n = 0;
  for (CellId kid : c.children()) {
    if (region.relate(kid) != CellRelation::disjoint) n++;
  }
  return n;
}

}  // namespace

Covering covering(const Region& region, const CoveringParams& params) {
  params.validate();
  if (region.empty()) throw Error("empty region");

  switch (params.mode) {
    case CoveringParams::Mode::homogeneous: {
      Covering out;
      out.params = params;
      out.cells = homogeneous_covering(region, params.max_level);
      return out;
    }
    case CoveringParams::Mode::interior:
      return interior_covering(region, params);
    case CoveringParams::Mode::ordinary:
      break;
  }

  Covering out;
  out.params = params;
  std::priority_queue<Candidate> queue;
  size_t queued = 0;
  for (int f = 0; f < kNumFaces; ++f) {
    CellId face = CellId::from_face(f);
    if (region.relate(face) != CellRelation::disjoint) {
      queue.push({face, 0, count_intersecting_children(region, face)});
      queued++;
    }
  }

  while (!queue.empty()) {
    Candidate cand = queue.top();
    queue.pop();
    queued--;

    bool terminal = cand.level >= params.max_level ||
                    region.contains_cell(cand.cell);
    // Replacing the candidate by its children costs up to 3 extra slots.
    bool budget = out.cells.size() + queued + 4 <=
                  static_cast<size_t>(params.max_cells);
    if (!terminal && (budget || cand.level < params.min_level)) {
      for (CellId kid : cand.cell.children()) {
        if (region.relate(kid) == CellRelation::disjoint) continue;
        queue.push({kid, cand.level + 1,
                    count_intersecting_children(region, kid)});
        queued++;
      }
    } else {
      out.cells.push_back(cand.cell);
    }
  }
  normalize_covering(&out.cells, params.min_level);
  return out;
}

Covering interior_covering(const Region& region, CoveringParams params) {
  params.mode = CoveringParams::Mode::interior;
  params.validate();
  if (region.empty()) throw Error("empty region");
  if (!region.is_areal()) throw Error("interior covering needs an areal region");

  Covering out;
  out.params = params;
  std::priority_queue<Candidate> queue;
  for (int f = 0; f < kNumFaces; ++f) {
    CellId face = CellId::from_face(f);
    if (region.relate(face) != CellRelation::disjoint) {
      queue.push({face, 0, 0});
    }
  }
  while (!queue.empty() &&
         out.cells.size() < static_cast<size_t>(params.max_cells)) {
    Candidate cand = queue.top();
    queue.pop();
    if (cand.level >= params.min_level && region.contains_cell(cand.cell)) {
      out.cells.push_back(cand.cell);
      continue;
    }
    if (cand.level >= params.max_level) continue;
    for (CellId kid : cand.cell.children()) {
      CellRelation r = region.relate(kid);
      if (r == CellRelation::disjoint || r == CellRelation::touches) continue;
      queue.push({kid, cand.level + 1, 0});
    }
  }
  normalize_covering(&out.cells, params.min_level);
  return out;
}

std::vector<CellId> homogeneous_covering(const Region& region, int level) {
  std::vector<CellId> out;
  HomogeneousStream stream(region, level);
  while (auto c = stream.next()) out.push_back(*c);
  return out;
}

Covering boundary_cells(const Region& region, int level) {
  Covering out;
  out.params.min_level = out.params.max_level = level;
  out.params.mode = CoveringParams::Mode::homogeneous;
  out.params.max_cells = std::numeric_limits<int>::max();
  HomogeneousStream stream(region, level, /*boundary_only=*/true);
  while (auto c = stream.next()) out.cells.push_back(*c);
  return out;
}

HomogeneousStream::HomogeneousStream(const Region& region, int level,
                                     bool boundary_only, bool include_touches)
    : region_(region),
      level_(level),
      boundary_only_(boundary_only),
      include_touches_(include_touches) {
  if (level < 0 || level > kMaxCellLevel) throw Error("invalid level");
  // Reverse face order so the stack pops in ascending id order.
  for (int f = kNumFaces - 1; f >= 0; --f) {
    stack_.push_back(CellId::from_face(f));
  }
}

std::optional<CellId> HomogeneousStream::next() {
  while (true) {
    if (in_range_) {
      if (range_cur_ < range_end_) {
        CellId c = range_cur_;
        range_cur_ = range_cur_.next();
        return c;
      }
      in_range_ = false;
    }
    if (stack_.empty()) return std::nullopt;
    CellId c = stack_.back();
    stack_.pop_back();
    CellRelation r = region_.relate(c);
    if (r == CellRelation::disjoint) continue;
    if (r == CellRelation::touches && !include_touches_) continue;
    if (c.level() == level_) {
      if (boundary_only_ && r == CellRelation::contains_cell) continue;
      return c;
    }
    if (r == CellRelation::contains_cell) {
      // Entire subtree is inside the region.
      if (boundary_only_) continue;
      in_range_ = true;
      range_cur_ = c.child_begin(level_);
      range_end_ = c.child_end(level_);
      continue;
    }
    auto kids = c.children();
    for (int k = 3; k >= 0; --k) stack_.push_back(kids[k]);
  }
}

}  // namespace geogrid
