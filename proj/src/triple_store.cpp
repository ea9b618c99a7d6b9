#include "geogrid/triple_store.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <map>
#include <random>
#include <set>

#include "geogrid/coverer.hpp"
#include "geogrid/error.hpp"
#include "geogrid/sphere.hpp"

namespace geogrid {

namespace {

std::string wire_form(const Term& t) {
  if (t.iri) return "<" + t.lexical + ">";
  std::string out = "\"" + t.lexical + "\"";
  if (!t.datatype.empty()) out += "^^<" + t.datatype + ">";
  return out;
}

std::string wire_iri(const std::string& iri) { return "<" + iri + ">"; }

}  // namespace

void TripleStore::insert(const Triple& t) {
  frozen_ = false;
  auto intern = [&](const std::string& text) -> uint32_t {
    auto it = std::lower_bound(by_text_.begin(), by_text_.end(), text,
                               [&](uint32_t id, const std::string& s) {
                                 return terms_[id] < s;
                               });
    if (it != by_text_.end() && terms_[*it] == text) return *it;
    uint32_t id = static_cast<uint32_t>(terms_.size());
    terms_.push_back(text);
    by_text_.insert(it, id);
    return id;
  };
  uint32_t s = intern(wire_iri(t.subject));
  uint32_t p = intern(wire_iri(t.predicate));
  uint32_t o = intern(wire_form(t.object));
  spo_.push_back({s, p, o});
}

TripleStore TripleStore::load(std::istream& in) {
  TripleStore store;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    store.insert(parse_ntriples_line(line, line_no));
  }
  store.freeze();
  return store;
}

void TripleStore::freeze() {
  std::sort(spo_.begin(), spo_.end());
  spo_.erase(std::unique(spo_.begin(), spo_.end()), spo_.end());
  pos_.clear();
  osp_.clear();
  pos_.reserve(spo_.size());
  osp_.reserve(spo_.size());
  for (const auto& t : spo_) {
    pos_.push_back({t[1], t[2], t[0]});
    osp_.push_back({t[2], t[0], t[1]});
  }
  std::sort(pos_.begin(), pos_.end());
  std::sort(osp_.begin(), osp_.end());
  frozen_ = true;
}

void TripleStore::ensure_frozen() const {
  if (!frozen_) {
    throw Error("store must be frozen before queries");
  }
}

size_t TripleStore::size() const { return spo_.size(); }

std::optional<uint32_t> TripleStore::term_id(const Term& term) const {
  std::string text = wire_form(term);
  auto it = std::lower_bound(
      by_text_.begin(), by_text_.end(), text,
      [&](uint32_t id, const std::string& s) { return terms_[id] < s; });
  if (it != by_text_.end() && terms_[*it] == text) return *it;
  return std::nullopt;
}

std::optional<uint32_t> TripleStore::iri_id(const std::string& iri) const {
  return term_id(Term::make_iri(iri));
}

const std::string& TripleStore::term_text(uint32_t id) const {
  return terms_.at(id);
}

std::string TripleStore::iri_text(uint32_t id) const {
  const std::string& text = terms_.at(id);
  if (text.size() < 2 || text.front() != '<' || text.back() != '>') {
    throw Error("term is not an IRI: " + text);
  }
  return text.substr(1, text.size() - 2);
}

bool TripleStore::has(const Triple& t) const {
  ensure_frozen();
  auto s = iri_id(t.subject);
  auto p = iri_id(t.predicate);
  auto o = term_id(t.object);
  if (!s || !p || !o) return false;
  return std::binary_search(spo_.begin(), spo_.end(),
                            std::array<uint32_t, 3>{*s, *p, *o});
}

namespace {

template <typename It>
std::pair<It, It> range2(It begin, It end, uint32_t a, uint32_t b) {
  std::array<uint32_t, 3> lo{a, b, 0};
  std::array<uint32_t, 3> hi{a, b, UINT32_MAX};
  return {std::lower_bound(begin, end, lo), std::upper_bound(begin, end, hi)};
}

}  // namespace

std::vector<uint32_t> TripleStore::objects(uint32_t subject,
                                           uint32_t predicate) const {
  ensure_frozen();
  auto [lo, hi] = range2(spo_.begin(), spo_.end(), subject, predicate);
  std::vector<uint32_t> out;
  for (auto it = lo; it != hi; ++it) out.push_back((*it)[2]);
  return out;
}

std::vector<uint32_t> TripleStore::subjects(uint32_t predicate,
                                            uint32_t object) const {
  ensure_frozen();
  auto [lo, hi] = range2(pos_.begin(), pos_.end(), predicate, object);
  std::vector<uint32_t> out;
  for (auto it = lo; it != hi; ++it) out.push_back((*it)[2]);
  return out;
}

std::vector<std::pair<uint32_t, uint32_t>> TripleStore::pairs(
    uint32_t predicate) const {
  ensure_frozen();
  std::array<uint32_t, 3> lo{predicate, 0, 0};
  std::array<uint32_t, 3> hi{predicate, UINT32_MAX, UINT32_MAX};
  auto begin = std::lower_bound(pos_.begin(), pos_.end(), lo);
  auto end = std::upper_bound(pos_.begin(), pos_.end(), hi);
  std::vector<std::pair<uint32_t, uint32_t>> out;
  for (auto it = begin; it != end; ++it) out.push_back({(*it)[2], (*it)[1]});
  return out;
}

std::vector<uint32_t> TripleStore::predicates_between(uint32_t subject,
                                                      uint32_t object) const {
  ensure_frozen();
  auto [lo, hi] = range2(osp_.begin(), osp_.end(), object, subject);
  std::vector<uint32_t> out;
  for (auto it = lo; it != hi; ++it) out.push_back((*it)[2]);
  return out;
}

std::vector<Term> TripleStore::literal_objects(uint32_t subject,
                                               uint32_t predicate) const {
  std::vector<Term> out;
  for (uint32_t id : objects(subject, predicate)) {
    const std::string& text = terms_.at(id);
    if (text.empty() || text.front() != '"') continue;
    size_t close = text.rfind('"');
    Term t = Term::make_literal(text.substr(1, close - 1));
    size_t caret = text.find("^^<", close);
    if (caret != std::string::npos) {
      t.datatype = text.substr(caret + 3, text.size() - caret - 4);
    }
    out.push_back(std::move(t));
  }
  return out;
}

PathQuery parse_path(std::string_view text, const IriScheme& scheme) {
  // Steps are separated by '/'. Full IRIs go in angle brackets; bare names
  // resolve against the ontology base. A trailing '*' marks a closure step.
  PathQuery q;
  size_t pos = 0;
  while (pos < text.size()) {
    PathQuery::Step step;
    std::string_view tok;
    if (text[pos] == '<') {
      size_t close = text.find('>', pos);
      if (close == std::string_view::npos) throw Error("unterminated <iri>");
      step.predicate = std::string(text.substr(pos + 1, close - pos - 1));
      pos = close + 1;
      if (pos < text.size() && text[pos] == '*') {
        step.closure = true;
        pos++;
      }
    } else {
      size_t slash = text.find('/', pos);
      tok = text.substr(pos, slash == std::string_view::npos ? text.size() - pos
                                                             : slash - pos);
      pos += tok.size();
      if (!tok.empty() && tok.back() == '*') {
        step.closure = true;
        tok.remove_suffix(1);
      }
      if (tok.empty()) throw Error("empty path step");
      step.predicate = scheme.ontology(tok);
    }
    q.steps.push_back(std::move(step));
    if (pos < text.size()) {
      if (text[pos] != '/') throw Error("expected '/' between path steps");
      pos++;
    }
  }
  if (q.steps.empty()) throw Error("path needs at least one step");
  return q;
}

std::vector<std::pair<std::string, std::string>> eval_path(
    const TripleStore& store, const PathQuery& query) {
  if (query.steps.empty()) throw Error("path needs at least one step");

  std::vector<uint32_t> preds;
  for (const auto& step : query.steps) {
    auto id = store.iri_id(step.predicate);
    if (!id) return {};  // unknown predicate: empty result, not an error
    preds.push_back(*id);
  }

  // (start, current) frontiers; closure steps read the same materialized
  // triples as plain ones.
  std::vector<std::pair<uint32_t, uint32_t>> frontier;
  if (query.start) {
    auto s = store.iri_id(*query.start);
    if (!s) return {};
    frontier = {{*s, *s}};
    for (uint32_t p : preds) {
      std::vector<std::pair<uint32_t, uint32_t>> next;
      for (auto [origin, node] : frontier) {
        for (uint32_t o : store.objects(node, p)) next.push_back({origin, o});
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      frontier = std::move(next);
    }
  } else {
    for (auto [s, o] : store.pairs(preds[0])) frontier.push_back({s, o});
    std::sort(frontier.begin(), frontier.end());
    frontier.erase(std::unique(frontier.begin(), frontier.end()),
                   frontier.end());
    for (size_t k = 1; k < preds.size(); ++k) {
      std::vector<std::pair<uint32_t, uint32_t>> next;
      for (auto [origin, node] : frontier) {
        for (uint32_t o : store.objects(node, preds[k])) {
          next.push_back({origin, o});
        }
      }
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      frontier = std::move(next);
    }
  }

  std::optional<uint32_t> end_id;
  if (query.end) {
    end_id = store.iri_id(*query.end);
    if (!end_id) return {};
  }
  std::set<std::pair<std::string, std::string>> out;
  for (auto [origin, node] : frontier) {
    if (end_id && node != *end_id) continue;
    out.insert({store.iri_text(origin), store.iri_text(node)});
  }
  return {out.begin(), out.end()};
}

std::vector<std::string> filter_by_literal(const TripleStore& store,
                                           std::span<const std::string> nodes,
                                           const std::string& predicate,
                                           LiteralCmp cmp,
                                           const std::string& value) {
  auto pred_id = store.iri_id(predicate);
  std::vector<std::string> out;
  if (!pred_id) return out;

  auto passes = [&](const std::string& lex) {
    int order;
    char* end1 = nullptr;
    char* end2 = nullptr;
    double a = std::strtod(lex.c_str(), &end1);
    double b = std::strtod(value.c_str(), &end2);
    bool numeric = end1 != lex.c_str() && *end1 == '\0' &&
                   end2 != value.c_str() && *end2 == '\0';
    if (numeric) {
      order = a < b ? -1 : (a > b ? 1 : 0);
    } else {
      order = lex.compare(value);
      order = order < 0 ? -1 : (order > 0 ? 1 : 0);
    }
    switch (cmp) {
      case LiteralCmp::eq: return order == 0;
      case LiteralCmp::ne: return order != 0;
      case LiteralCmp::lt: return order < 0;
      case LiteralCmp::le: return order <= 0;
      case LiteralCmp::gt: return order > 0;
      case LiteralCmp::ge: return order >= 0;
    }
    return false;
  };

  for (const std::string& node : nodes) {
    auto id = store.iri_id(node);
    if (!id) continue;
    for (const Term& lit : store.literal_objects(*id, *pred_id)) {
      if (passes(lit.lexical)) {
        out.push_back(node);
        break;
      }
    }
  }
  return out;
}

// --- benchmark ----------------------------------------------------------------

namespace {

double median_ms(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  return samples[samples.size() / 2];
}

template <typename F>
double time_ms(F&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  fn();
  auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

SphericalPolygon random_region(std::mt19937_64& rng, double lat, double lng,
                               double radius) {
  constexpr int kVerts = 32;
  std::uniform_real_distribution<double> jitter(0.75, 1.0);
  std::vector<LatLng> ring;
  for (int k = 0; k < kVerts; ++k) {
    double ang = 2 * M_PI * k / kVerts;
    double r = radius * jitter(rng);
    ring.push_back(LatLng(lat + r * std::sin(ang), lng + r * std::cos(ang)));
  }
  ring.push_back(ring.front());
  // Edges are ~2% of a degree; no densification needed at this scale.
  return SphericalPolygon({densify_ring(ring, 10.0)});
}

bool polygons_intersect(const SphericalPolygon& a, const SphericalPolygon& b) {
  if (contains_point(a, b.shell()[0]) || contains_point(b, a.shell()[0])) {
    return true;
  }
  // Edge crossing scan.
  const Loop& la = a.shell();
  const Loop& lb = b.shell();
  for (size_t i = 0; i < la.size(); ++i) {
    const Vec3& p1 = la[i];
    const Vec3& p2 = la[(i + 1) % la.size()];
    Vec3 n1 = p1.cross(p2);
    for (size_t j = 0; j < lb.size(); ++j) {
      const Vec3& q1 = lb[j];
      const Vec3& q2 = lb[(j + 1) % lb.size()];
      double s1 = n1.dot(q1), s2 = n1.dot(q2);
      if (s1 * s2 > 0) continue;
      Vec3 n2 = q1.cross(q2);
      if (n2.dot(p1) * n2.dot(p2) <= 0) {
        // Verify the shared point lies on both arcs.
        Vec3 x = n1.cross(n2);
        double xn = x.norm();
        if (xn < 1e-30) return true;
        x /= xn;
        for (const Vec3& cand : {x, Vec3(-x)}) {
          bool on_a = p1.cross(cand).dot(n1) >= 0 && cand.cross(p2).dot(n1) >= 0;
          bool on_b = q1.cross(cand).dot(n2) >= 0 && cand.cross(q2).dot(n2) >= 0;
          if (on_a && on_b) return true;
        }
      }
    }
  }
  return false;
}

}  // namespace

BenchReport bench_compare(const BenchSpec& spec) {
  if (spec.n_points < 1 || spec.m_regions < 1) throw Error("bad bench spec");
  std::mt19937_64 rng(spec.seed);
  BenchReport report;
  const IriScheme scheme;

  // Synthetic dataset over the central US.
  std::uniform_real_distribution<double> rlat(31.0, 44.0), rlng(-113.0, -87.0);
  std::uniform_real_distribution<double> radius(0.15, 0.3);
  std::vector<SphericalPolygon> regions;
  std::vector<std::string> region_iris;
  for (int i = 0; i < spec.m_regions; ++i) {
    regions.push_back(random_region(rng, rlat(rng), rlng(rng), radius(rng)));
    region_iris.push_back(scheme.feature_iri("region/" + std::to_string(i)));
  }
  std::uniform_real_distribution<double> plat(30.5, 44.5), plng(-113.5, -86.5);
  std::vector<Vec3> points;
  std::vector<std::string> point_iris;
  for (int i = 0; i < spec.n_points; ++i) {
    points.push_back(LatLng(plat(rng), plng(rng)).to_point());
    point_iris.push_back(scheme.feature_iri("pt/" + std::to_string(i)));
  }

  // Materialize the enrichment: region->cell containment/overlap links and
  // point->cell links, with inverses.
  TripleStore store;
  std::string sf_contains = scheme.relation_iri(Relation::sf_contains);
  std::string sf_within = scheme.relation_iri(Relation::sf_within);
  std::string sf_overlaps = scheme.relation_iri(Relation::sf_overlaps);
  report.build_ms = time_ms([&] {
    for (int i = 0; i < spec.m_regions; ++i) {
      Region region(regions[i]);
      HomogeneousStream stream(region, spec.level);
      while (auto cid = stream.next()) {
        std::string cell = scheme.cell_iri(*cid);
        if (region.contains_cell(*cid)) {
          store.insert({region_iris[i], sf_contains, Term::make_iri(cell)});
          store.insert({cell, sf_within, Term::make_iri(region_iris[i])});
        } else {
          store.insert({region_iris[i], sf_overlaps, Term::make_iri(cell)});
          store.insert({cell, sf_overlaps, Term::make_iri(region_iris[i])});
        }
      }
    }
    for (int i = 0; i < spec.n_points; ++i) {
      std::string cell =
          scheme.cell_iri(CellId::from_point(points[i], spec.level));
      store.insert({cell, sf_contains, Term::make_iri(point_iris[i])});
      store.insert({point_iris[i], sf_within, Term::make_iri(cell)});
    }
    store.freeze();
  });
  report.store_triples = store.size();

  // --- P/A: points in regions -------------------------------------------------
  std::string point_prefix = scheme.feature_iri("pt/");
  std::vector<std::set<std::string>> enriched_hits(spec.m_regions);
  auto run_enriched = [&] {
    for (int i = 0; i < spec.m_regions; ++i) {
      enriched_hits[i].clear();
      for (const std::string& link : {sf_contains, sf_overlaps}) {
        PathQuery q;
        q.start = region_iris[i];
        q.steps = {{link, false}, {sf_contains, false}};
        for (auto& [origin, end] : eval_path(store, q)) {
          if (end.rfind(point_prefix, 0) == 0) enriched_hits[i].insert(end);
        }
      }
    }
  };
  std::vector<double> samples;
  for (int r = 0; r < spec.runs; ++r) samples.push_back(time_ms(run_enriched));
  report.enriched_ms = median_ms(samples);

  std::vector<std::set<std::string>> geometric_hits(spec.m_regions);
  auto run_geometric = [&] {
    for (int i = 0; i < spec.m_regions; ++i) {
      geometric_hits[i].clear();
      for (int p = 0; p < spec.n_points; ++p) {
        if (contains_point(regions[i], points[p])) {
          geometric_hits[i].insert(point_iris[p]);
        }
      }
    }
  };
  samples.clear();
  for (int r = 0; r < spec.runs; ++r) samples.push_back(time_ms(run_geometric));
  report.geometric_ms = median_ms(samples);

  double cell_width_rad = 2.0 * std::sqrt(average_area_sr(spec.level));
  for (int i = 0; i < spec.m_regions; ++i) {
    report.enriched_results += enriched_hits[i].size();
    report.geometric_results += geometric_hits[i].size();
    std::vector<std::string> diff;
    std::set_symmetric_difference(
        enriched_hits[i].begin(), enriched_hits[i].end(),
        geometric_hits[i].begin(), geometric_hits[i].end(),
        std::back_inserter(diff));
    for (const std::string& iri : diff) {
      int p = std::stoi(iri.substr(point_prefix.size()));
      if (distance_to_boundary(regions[i], points[p]) > cell_width_rad) {
        report.mismatches_boundary_adjacent = false;
      }
      report.mismatches.push_back("region/" + std::to_string(i) + " " + iri);
    }
  }

  // --- A/A: regions overlapping regions ---------------------------------------
  std::string region_prefix = scheme.feature_iri("region/");
  std::set<std::pair<int, int>> enriched_pairs;
  auto run_enriched_aa = [&] {
    enriched_pairs.clear();
    // Group the cell->region links by cell with one scan per predicate.
    std::map<uint32_t, std::vector<int>> cell_regions;
    for (const std::string& link : {sf_within, sf_overlaps}) {
      auto pid = store.iri_id(link);
      if (!pid) continue;
      for (auto [s, o] : store.pairs(*pid)) {
        const std::string obj = store.iri_text(o);
        if (obj.rfind(region_prefix, 0) != 0) continue;
        cell_regions[s].push_back(std::stoi(obj.substr(region_prefix.size())));
      }
    }
    for (auto& [cell, rs] : cell_regions) {
      for (size_t a = 0; a < rs.size(); ++a) {
        for (size_t b = a + 1; b < rs.size(); ++b) {
          int lo = std::min(rs[a], rs[b]), hi = std::max(rs[a], rs[b]);
          if (lo != hi) enriched_pairs.insert({lo, hi});
        }
      }
    }
  };
  samples.clear();
  for (int r = 0; r < spec.runs; ++r) {
    samples.push_back(time_ms(run_enriched_aa));
  }
  report.enriched_aa_ms = median_ms(samples);

  std::set<std::pair<int, int>> geometric_pairs;
  auto run_geometric_aa = [&] {
    geometric_pairs.clear();
    for (int a = 0; a < spec.m_regions; ++a) {
      for (int b = a + 1; b < spec.m_regions; ++b) {
        if (polygons_intersect(regions[a], regions[b])) {
          geometric_pairs.insert({a, b});
        }
      }
    }
  };
  samples.clear();
  for (int r = 0; r < spec.runs; ++r) {
    samples.push_back(time_ms(run_geometric_aa));
  }
  report.geometric_aa_ms = median_ms(samples);

  report.enriched_aa_results = enriched_pairs.size();
  report.geometric_aa_results = geometric_pairs.size();
  std::vector<std::pair<int, int>> aa_diff;
  std::set_symmetric_difference(enriched_pairs.begin(), enriched_pairs.end(),
                                geometric_pairs.begin(), geometric_pairs.end(),
                                std::back_inserter(aa_diff));
  for (auto [a, b] : aa_diff) {
    // A spurious pair comes from a shared boundary cell; the regions must
    // pass within one cell width of each other.
    double gap = M_PI;
    for (const Vec3& v : regions[a].shell()) {
      gap = std::min(gap, distance_to_boundary(regions[b], v));
    }
    for (const Vec3& v : regions[b].shell()) {
      gap = std::min(gap, distance_to_boundary(regions[a], v));
    }
    if (gap > 2 * cell_width_rad) report.aa_mismatches_boundary_adjacent = false;
    report.aa_mismatches.push_back("region/" + std::to_string(a) + " region/" +
                                   std::to_string(b));
  }
  return report;
}

}  // namespace geogrid
