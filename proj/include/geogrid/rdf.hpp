#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "geogrid/cell.hpp"
#include "geogrid/discretize.hpp"
#include "geogrid/enrich.hpp"
#include "geogrid/wkt.hpp"

namespace geogrid {

namespace vocab {

inline constexpr const char* kRdfType =
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr const char* kGeo = "http://www.opengis.net/ont/geosparql#";
inline constexpr const char* kSf = "http://www.opengis.net/ont/sf#";
inline constexpr const char* kSosa = "http://www.w3.org/ns/sosa/";
inline constexpr const char* kXsd = "http://www.w3.org/2001/XMLSchema#";

}  // namespace vocab

/// Object-position term: an IRI or a (possibly typed) literal.
struct Term {
  std::string lexical;
  std::string datatype;  // empty for IRIs and plain literals
  bool iri = false;

  static Term make_iri(std::string value) { return {std::move(value), "", true}; }
  static Term make_literal(std::string lexical, std::string datatype = "") {
    return {std::move(lexical), std::move(datatype), false};
  }

  friend auto operator<=>(const Term&, const Term&) = default;
};

struct Triple {
  std::string subject;  // IRI
  std::string predicate;
  Term object;

  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// IRI production rules. Cell IRIs follow `s2.level{L}.{decimal id}` under
/// the resource base and are injective over cells.
struct IriScheme {
  std::string resource_base = "http://stko-kwg.geog.ucsb.edu/lod/resource/";
  std::string ontology_base = "http://stko-kwg.geog.ucsb.edu/lod/ontology/";

  std::string ontology(std::string_view local) const {
    return ontology_base + std::string(local);
  }
  std::string cell_iri(CellId c) const;
  std::optional<CellId> parse_cell_iri(std::string_view iri) const;
  std::string cell_geometry_iri(CellId c) const;
  std::string feature_iri(const std::string& id) const;
  std::string entity_iri(const EntityRef& e) const;
  std::string observation_iri(const Observation& o) const;
  std::string property_iri(const std::string& property) const;
  std::string relation_iri(Relation r) const;
};

/// Geometry handling when emitting cells: the three antimeridian policies
/// plus omitting geometry nodes entirely.
enum class GeometryPolicy { split, reject, point_abstract, none };

GeometryPolicy geometry_policy_from_string(std::string_view s);

/// Type, geometry (per policy), hasID and hasM2Area triples for one cell.
std::vector<Triple> emit_cell(CellId c, const IriScheme& scheme,
                              GeometryPolicy policy = GeometryPolicy::split);

/// One triple per relation record, deduplicated.
std::vector<Triple> emit_relations(std::span<const RelationRecord> records,
                                   const IriScheme& scheme);

/// Observation node: type, feature of interest, observed property, simple
/// result, phenomenon time.
std::vector<Triple> emit_observation(const Observation& o,
                                     const IriScheme& scheme);

/// Rebuild observations from emitted triples (inverse of emit_observation).
std::vector<Observation> observations_from_triples(
    std::span<const Triple> triples, const IriScheme& scheme,
    const PropertyManifest* manifest = nullptr);

/// Forward-chain the transitive predicate (sfWithin) to a fixpoint, adding
/// the sfContains inverse of every inferred edge. Chains running purely
/// between features are ignored unless `include_feature_chains` is set.
/// Cycles are an error: spatial containment must be acyclic.
std::vector<Triple> materialize_transitive(std::vector<Triple> triples,
                                           const IriScheme& scheme,
                                           bool include_feature_chains = false);

// --- N-Triples ---------------------------------------------------------------

std::string to_ntriples_line(const Triple& t);
void write_ntriples(std::ostream& out, std::span<const Triple> triples);

/// Parse one N-Triples statement. Throws ParseError carrying `line_no`.
Triple parse_ntriples_line(std::string_view line, size_t line_no = 0);

/// Read a whole stream; blank lines and comment lines are skipped.
std::vector<Triple> read_ntriples(std::istream& in);

}  // namespace geogrid
