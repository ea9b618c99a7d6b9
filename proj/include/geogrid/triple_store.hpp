#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geogrid/rdf.hpp"

namespace geogrid {

/// Immutable-after-freeze triple store with SPO/POS/OSP orderings over
/// interned terms. Reads are freely concurrent once frozen.
class TripleStore {
 public:
  void insert(const Triple& t);

  /// Load N-Triples; parse errors carry their line number.
  static TripleStore load(std::istream& in);

  /// Sort and dedupe the three indexes. Implicit before the first query.
  void freeze();

  size_t size() const;
  bool has(const Triple& t) const;

  /// Terms are interned in their wire form ("<iri>" or literal syntax).
  std::optional<uint32_t> term_id(const Term& term) const;
  std::optional<uint32_t> iri_id(const std::string& iri) const;
  const std::string& term_text(uint32_t id) const;
  /// IRI text without angle brackets (throws for literals).
  std::string iri_text(uint32_t id) const;

  std::vector<uint32_t> objects(uint32_t subject, uint32_t predicate) const;
  std::vector<uint32_t> subjects(uint32_t predicate, uint32_t object) const;
  std::vector<std::pair<uint32_t, uint32_t>> pairs(uint32_t predicate) const;
  std::vector<uint32_t> predicates_between(uint32_t subject,
                                           uint32_t object) const;

  /// Every distinct literal object of (subject, predicate).
  std::vector<Term> literal_objects(uint32_t subject,
                                    uint32_t predicate) const;

 private:
  void ensure_frozen() const;

  std::vector<std::string> terms_;
  std::vector<std::array<uint32_t, 3>> spo_, pos_, osp_;
  mutable bool frozen_ = false;
  // intern map kept simple: sorted (text -> id) built lazily
  std::vector<uint32_t> by_text_;
};

/// Fixed-length predicate path. A closure-starred step relies on the
/// precomputed transitive triples already present in the store; there is
/// no runtime chaining.
struct PathQuery {
  struct Step {
    std::string predicate;  // absolute IRI
    bool closure = false;
  };
  std::vector<Step> steps;
  std::optional<std::string> start;  // bound subject IRI
  std::optional<std::string> end;    // bound object IRI
};

/// Parse "p1/p2*/p3" with optional closure stars. Names without "://" are
/// resolved against the scheme's ontology base.
PathQuery parse_path(std::string_view text, const IriScheme& scheme);

/// All (start, end) bindings joined along the path, sorted and unique.
std::vector<std::pair<std::string, std::string>> eval_path(
    const TripleStore& store, const PathQuery& query);

enum class LiteralCmp { eq, ne, lt, le, gt, ge };

/// Keep the candidates whose (candidate, predicate, literal) matches the
/// comparison; numeric when both sides parse as numbers, else lexical.
std::vector<std::string> filter_by_literal(const TripleStore& store,
                                           std::span<const std::string> nodes,
                                           const std::string& predicate,
                                           LiteralCmp cmp,
                                           const std::string& value);

// --- benchmark ----------------------------------------------------------------

struct BenchSpec {
  int n_points = 50000;
  int m_regions = 100;
  int level = 13;
  uint64_t seed = 1;
  int runs = 5;  // timing is the median over this many runs
};

struct BenchReport {
  // Points-in-region (P/A) comparison.
  double enriched_ms = 0;
  double geometric_ms = 0;
  size_t enriched_results = 0;
  size_t geometric_results = 0;
  std::vector<std::string> mismatches;  // itemized symmetric difference
  bool mismatches_boundary_adjacent = true;

  // Region-overlaps-region (A/A) comparison.
  double enriched_aa_ms = 0;
  double geometric_aa_ms = 0;
  size_t enriched_aa_results = 0;
  size_t geometric_aa_results = 0;
  std::vector<std::string> aa_mismatches;
  bool aa_mismatches_boundary_adjacent = true;

  size_t store_triples = 0;
  double build_ms = 0;
};

/// Build a synthetic dataset (N random points, M random region polygons),
/// materialize its enrichment into a store, and run the same semantic
/// queries two ways: joins over materialized cell links vs direct
/// geometric evaluation. Result sets must agree up to boundary-adjacent
/// entities.
BenchReport bench_compare(const BenchSpec& spec);

}  // namespace geogrid
