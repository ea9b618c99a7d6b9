#include "geogrid/triple_store.hpp"

#include <random>
#include <set>
#include <sstream>

#include <doctest.h>

#include "geogrid/error.hpp"

using namespace geogrid;

namespace {

const IriScheme kScheme;

Triple t3(const std::string& s, const std::string& p, const std::string& o) {
  return {s, p, Term::make_iri(o)};
}

// Naive nested-loop join over a plain triple list.
std::set<std::pair<std::string, std::string>> naive_path(
    const std::vector<Triple>& triples, const PathQuery& q) {
  std::set<std::pair<std::string, std::string>> frontier;
  for (const Triple& t : triples) {
    if (t.predicate == q.steps[0].predicate && t.object.iri) {
      if (q.start && t.subject != *q.start) continue;
      frontier.insert({t.subject, t.object.lexical});
    }
  }
  for (size_t k = 1; k < q.steps.size(); ++k) {
    std::set<std::pair<std::string, std::string>> next;
    for (const auto& [origin, node] : frontier) {
      for (const Triple& t : triples) {
        if (t.subject == node && t.predicate == q.steps[k].predicate &&
            t.object.iri) {
          next.insert({origin, t.object.lexical});
        }
      }
    }
    frontier = std::move(next);
  }
  if (q.end) {
    std::set<std::pair<std::string, std::string>> filtered;
    for (const auto& pr : frontier) {
      if (pr.second == *q.end) filtered.insert(pr);
    }
    frontier = std::move(filtered);
  }
  return frontier;
}

}  // namespace

TEST_CASE("empty stream loads an empty store") {
  std::istringstream in("");
  TripleStore store = TripleStore::load(in);
  CHECK(store.size() == 0);
}

TEST_CASE("duplicate lines collapse to one triple") {
  std::istringstream in(
      "<http://x/a> <http://x/p> <http://x/b> .\n"
      "<http://x/a> <http://x/p> <http://x/b> .\n"
      "<http://x/a> <http://x/p> \"lit\" .\n");
  TripleStore store = TripleStore::load(in);
  CHECK(store.size() == 2);
}

TEST_CASE("load reports parse errors with line numbers") {
  std::istringstream in(
      "<http://x/a> <http://x/p> <http://x/b> .\n"
      "<http://x/a> <http://x/p> broken .\n");
  try {
    TripleStore::load(in);
    CHECK(false);
  } catch (const ParseError& e) {
    CHECK(e.position() == 2);
  }
}

TEST_CASE("emitted cell triples load with conserved counts") {
  std::ostringstream buf;
  size_t expected = 0;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lat(-60, 60), lng(-170, 170);
  for (int k = 0; k < 100; ++k) {
    CellId c = CellId::from_latlng(LatLng(lat(rng), lng(rng)), 13);
    auto triples = emit_cell(c, kScheme);
    expected += triples.size();
    write_ntriples(buf, triples);
  }
  std::istringstream in(buf.str());
  TripleStore store = TripleStore::load(in);
  CHECK(store.size() == expected);  // distinct cells: nothing collapses
}

TEST_CASE("triples are retrievable through all three orderings") {
  std::vector<Triple> triples;
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> node(0, 30);
  TripleStore store;
  for (int k = 0; k < 500; ++k) {
    Triple t = t3("http://x/n" + std::to_string(node(rng)),
                  "http://x/p" + std::to_string(node(rng) % 5),
                  "http://x/n" + std::to_string(node(rng)));
    triples.push_back(t);
    store.insert(t);
  }
  store.freeze();
  for (const Triple& t : triples) {
    CHECK(store.has(t));
    uint32_t s = *store.iri_id(t.subject);
    uint32_t p = *store.iri_id(t.predicate);
    uint32_t o = *store.term_id(t.object);
    auto objs = store.objects(s, p);
    CHECK(std::count(objs.begin(), objs.end(), o) == 1);
    auto subs = store.subjects(p, o);
    CHECK(std::count(subs.begin(), subs.end(), s) == 1);
    auto preds = store.predicates_between(s, o);
    CHECK(std::count(preds.begin(), preds.end(), p) == 1);
  }
}

TEST_CASE("single step path equals a predicate scan") {
  std::istringstream in(
      "<http://x/a> <http://x/p> <http://x/b> .\n"
      "<http://x/c> <http://x/p> <http://x/d> .\n"
      "<http://x/a> <http://x/q> <http://x/c> .\n");
  TripleStore store = TripleStore::load(in);
  PathQuery q;
  q.steps = {{"http://x/p", false}};
  auto got = eval_path(store, q);
  REQUIRE(got.size() == 2);
  CHECK(got[0] == std::pair<std::string, std::string>("http://x/a", "http://x/b"));
  CHECK(got[1] == std::pair<std::string, std::string>("http://x/c", "http://x/d"));
}

TEST_CASE("path through a zero-fan-out node is empty") {
  std::istringstream in("<http://x/a> <http://x/p> <http://x/b> .\n");
  TripleStore store = TripleStore::load(in);
  PathQuery q;
  q.steps = {{"http://x/p", false}, {"http://x/p", false}};
  CHECK(eval_path(store, q).empty());
  // Unknown predicates give empty results, not errors.
  PathQuery unknown;
  unknown.steps = {{"http://x/nope", false}};
  CHECK(eval_path(store, unknown).empty());
}

TEST_CASE("path parsing handles stars and bare names") {
  PathQuery q = parse_path("sfWithin*/<http://www.w3.org/ns/sosa/hasFeatureOfInterest>",
                           kScheme);
  REQUIRE(q.steps.size() == 2);
  CHECK(q.steps[0].closure);
  CHECK(q.steps[0].predicate == kScheme.ontology("sfWithin"));
  CHECK(q.steps[1].predicate == "http://www.w3.org/ns/sosa/hasFeatureOfInterest");
  CHECK_THROWS_AS(parse_path("", kScheme), Error);
}

TEST_CASE("a conflation query over seeded observations finds exactly the seeded cells") {
  // Three observation collections touch overlapping cell ranges; only
  // cells 7..9 satisfy all three patterns.
  std::string foi = std::string(vocab::kSosa) + "hasFeatureOfInterest";
  std::string contains = kScheme.relation_iri(Relation::sf_contains);
  std::string result = std::string(vocab::kSosa) + "hasSimpleResult";
  TripleStore store;
  CellId base = CellId::from_latlng(LatLng(36.5, -105.2), 10);
  std::vector<std::string> cells;
  int idx = 0;
  for (CellId c = base.child_begin(13); idx < 20; c = c.next(), ++idx) {
    cells.push_back(kScheme.cell_iri(c));
  }
  auto link = [&](const std::string& obs, const std::string& region, int lo,
                  int hi) {
    store.insert(t3(obs, foi, region));
    for (int k = lo; k <= hi; ++k) store.insert(t3(region, contains, cells[k]));
  };
  link("http://x/fire_oc", "http://x/regionA", 0, 9);
  link("http://x/climate_oc", "http://x/regionB", 5, 14);
  link("http://x/svi_ob", "http://x/regionC", 7, 12);
  store.insert({"http://x/svi_ob", result,
                Term::make_literal("0.83", std::string(vocab::kXsd) + "decimal")});
  store.freeze();

  PathQuery q;
  q.steps = {{foi, false}, {contains, false}};
  std::map<std::string, std::set<std::string>> ends;
  for (const char* obs : {"http://x/fire_oc", "http://x/climate_oc",
                          "http://x/svi_ob"}) {
    q.start = obs;
    for (auto& [o, cell] : eval_path(store, q)) ends[obs].insert(cell);
  }
  std::set<std::string> conflated;
  for (const std::string& cell : ends["http://x/fire_oc"]) {
    if (ends["http://x/climate_oc"].count(cell) &&
        ends["http://x/svi_ob"].count(cell)) {
      conflated.insert(cell);
    }
  }
  CHECK(conflated == std::set<std::string>(cells.begin() + 7, cells.begin() + 10));

  // FILTER on the SVI literal keeps / drops the observation.
  std::vector<std::string> nodes = {"http://x/svi_ob"};
  CHECK(filter_by_literal(store, nodes, result, LiteralCmp::gt, "0.5").size() == 1);
  CHECK(filter_by_literal(store, nodes, result, LiteralCmp::gt, "0.9").empty());
}

TEST_CASE("eval_path equals the naive join oracle on random stores") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> node(0, 40), pred(0, 4), len(1, 3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Triple> triples;
    TripleStore store;
    for (int k = 0; k < 400; ++k) {
      Triple t = t3("http://x/n" + std::to_string(node(rng)),
                    "http://x/p" + std::to_string(pred(rng)),
                    "http://x/n" + std::to_string(node(rng)));
      triples.push_back(t);
      store.insert(t);
    }
    store.freeze();
    for (int qk = 0; qk < 5; ++qk) {
      PathQuery q;
      int steps = len(rng);
      for (int s = 0; s < steps; ++s) {
        q.steps.push_back({"http://x/p" + std::to_string(pred(rng)), false});
      }
      if (qk % 2 == 0) q.start = "http://x/n" + std::to_string(node(rng));
      if (qk % 3 == 0) q.end = "http://x/n" + std::to_string(node(rng));
      auto got = eval_path(store, q);
      auto want = naive_path(triples, q);
      CHECK(std::set<std::pair<std::string, std::string>>(got.begin(),
                                                          got.end()) == want);
    }
  }
}

TEST_CASE("bench compare smoke run") {
  BenchSpec spec;
  spec.n_points = 3000;
  spec.m_regions = 8;
  spec.level = 12;
  spec.seed = 7;
  spec.runs = 1;
  BenchReport report = bench_compare(spec);
  CHECK(report.store_triples > 0);
  CHECK(report.geometric_results > 0);
  // Result parity up to boundary-adjacent entities.
  CHECK(report.mismatches_boundary_adjacent);
  CHECK(report.aa_mismatches_boundary_adjacent);
  CHECK(report.enriched_results >= report.geometric_results);
  CHECK(report.mismatches.size() <
        std::max<size_t>(20, report.geometric_results / 10));
}
