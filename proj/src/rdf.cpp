#include "geogrid/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "geogrid/error.hpp"

namespace geogrid {

namespace {

std::string format_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string capitalized_local(const std::string& property) {
  // Base name before any category suffix, capitalized.
  std::string base = property.substr(0, property.find('/'));
  size_t cut = std::max(base.rfind('#'), base.rfind(':'));
  if (cut != std::string::npos) base = base.substr(cut + 1);
  if (!base.empty()) base[0] = static_cast<char>(std::toupper(base[0]));
  return base;
}

bool looks_like_year(const std::string& s) {
  return s.size() == 4 &&
         std::all_of(s.begin(), s.end(),
                     [](unsigned char c) { return std::isdigit(c); });
}

bool looks_like_date(const std::string& s) {
  return s.size() == 10 && s[4] == '-' && s[7] == '-';
}

}  // namespace

std::string IriScheme::cell_iri(CellId c) const {
  return resource_base + "s2.level" + std::to_string(c.level()) + "." +
         std::to_string(c.raw());
}

std::optional<CellId> IriScheme::parse_cell_iri(std::string_view iri) const {
  if (iri.rfind(resource_base, 0) != 0) return std::nullopt;
  std::string_view rest = iri.substr(resource_base.size());
  if (rest.rfind("s2.level", 0) != 0) return std::nullopt;
  rest.remove_prefix(8);
  size_t dot = rest.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  int level = 0;
  auto lvl = std::from_chars(rest.data(), rest.data() + dot, level);
  if (lvl.ec != std::errc() || lvl.ptr != rest.data() + dot) return std::nullopt;
  std::string_view digits = rest.substr(dot + 1);
  uint64_t raw = 0;
  auto res = std::from_chars(digits.data(), digits.data() + digits.size(), raw);
  if (res.ec != std::errc() || res.ptr != digits.data() + digits.size()) {
    return std::nullopt;
  }
  CellId c(raw);
  if (!c.is_valid() || c.level() != level) {
    throw Error("malformed cell IRI: " + std::string(iri));
  }
  return c;
}

std::string IriScheme::cell_geometry_iri(CellId c) const {
  return resource_base + "geometry/s2.level" + std::to_string(c.level()) +
         "." + std::to_string(c.raw());
}

std::string IriScheme::feature_iri(const std::string& id) const {
  return resource_base + id;
}

std::string IriScheme::entity_iri(const EntityRef& e) const {
  return e.is_cell() ? cell_iri(e.cell) : feature_iri(e.feature_id);
}

std::string IriScheme::observation_iri(const Observation& o) const {
  std::string prop = o.property;
  std::replace(prop.begin(), prop.end(), '/', '.');
  std::string iri = resource_base + "observation/" + prop + "." +
                    std::to_string(o.cell.raw());
  if (!o.phenomenon_time.empty()) iri += "." + o.phenomenon_time;
  return iri;
}

std::string IriScheme::property_iri(const std::string& property) const {
  if (property.find("://") != std::string::npos) return property;
  return ontology_base + property;
}

std::string IriScheme::relation_iri(Relation r) const {
  return ontology(to_string(r));
}

GeometryPolicy geometry_policy_from_string(std::string_view s) {
  if (s == "split") return GeometryPolicy::split;
  if (s == "reject") return GeometryPolicy::reject;
  if (s == "point" || s == "point-abstract") return GeometryPolicy::point_abstract;
  if (s == "none" || s == "point-abstract-none") return GeometryPolicy::none;
  throw Error("unknown geometry policy: " + std::string(s));
}

std::vector<Triple> emit_cell(CellId c, const IriScheme& scheme,
                              GeometryPolicy policy) {
  if (!c.is_valid()) throw Error("invalid cell");
  std::vector<Triple> out;
  std::string cell = scheme.cell_iri(c);
  out.push_back({cell, vocab::kRdfType,
                 Term::make_iri(scheme.ontology(
                     "S2Cell_Level" + std::to_string(c.level())))});

  if (policy != GeometryPolicy::none) {
    AntimeridianPolicy wkt_policy;
    switch (policy) {
      case GeometryPolicy::split: wkt_policy = AntimeridianPolicy::split; break;
      case GeometryPolicy::reject: wkt_policy = AntimeridianPolicy::reject; break;
      default: wkt_policy = AntimeridianPolicy::point_abstract; break;
    }
    std::string wkt = cell_to_wkt(c, wkt_policy);
    const char* sf_class = "Polygon";
    if (wkt.rfind("MULTIPOLYGON", 0) == 0) sf_class = "MultiPolygon";
    if (wkt.rfind("POINT", 0) == 0) sf_class = "Point";
    std::string geom = scheme.cell_geometry_iri(c);
    out.push_back({cell, std::string(vocab::kGeo) + "hasGeometry",
                   Term::make_iri(geom)});
    out.push_back({geom, vocab::kRdfType,
                   Term::make_iri(std::string(vocab::kSf) + sf_class)});
    out.push_back({geom, std::string(vocab::kGeo) + "asWKT",
                   Term::make_literal(std::move(wkt),
                                      std::string(vocab::kGeo) + "wktLiteral")});
  }

  out.push_back({cell, scheme.ontology("hasID"),
                 Term::make_literal(std::to_string(c.raw()))});
  out.push_back({cell, scheme.ontology("hasM2Area"),
                 Term::make_literal(format_decimal(c.area_km2() * 1e6),
                                    std::string(vocab::kXsd) + "decimal")});
  return out;
}

std::vector<Triple> emit_relations(std::span<const RelationRecord> records,
                                   const IriScheme& scheme) {
  std::set<Triple> dedup;
  for (const RelationRecord& r : records) {
    dedup.insert({scheme.entity_iri(r.subject), scheme.relation_iri(r.relation),
                  Term::make_iri(scheme.entity_iri(r.object))});
  }
  return {dedup.begin(), dedup.end()};
}

std::vector<Triple> emit_observation(const Observation& o,
                                     const IriScheme& scheme) {
  if (o.phenomenon_time.empty()) {
    throw Error("observation for " + o.property + " is missing its time scope");
  }
  std::vector<Triple> out;
  std::string obs = scheme.observation_iri(o);
  out.push_back({obs, vocab::kRdfType,
                 Term::make_iri(scheme.ontology(capitalized_local(o.property) +
                                                "S2OverlapObservation"))});
  out.push_back({obs, std::string(vocab::kSosa) + "hasFeatureOfInterest",
                 Term::make_iri(scheme.cell_iri(o.cell))});
  out.push_back({obs, std::string(vocab::kSosa) + "observedProperty",
                 Term::make_iri(scheme.property_iri(o.property))});
  std::string datatype = std::string(vocab::kXsd) +
                         (o.unit == "count" ? "integer" : "decimal");
  out.push_back({obs, std::string(vocab::kSosa) + "hasSimpleResult",
                 Term::make_literal(format_decimal(o.value), datatype)});
  std::string time_type =
      looks_like_year(o.phenomenon_time)
          ? std::string(vocab::kXsd) + "gYear"
          : (looks_like_date(o.phenomenon_time)
                 ? std::string(vocab::kXsd) + "date"
                 : std::string(vocab::kXsd) + "string");
  out.push_back({obs, std::string(vocab::kSosa) + "phenomenonTime",
                 Term::make_literal(o.phenomenon_time, time_type)});
  return out;
}

std::vector<Observation> observations_from_triples(
    std::span<const Triple> triples, const IriScheme& scheme,
    const PropertyManifest* manifest) {
  std::map<std::string, Observation> by_node;
  std::set<std::string> seen_foi;
  const std::string foi = std::string(vocab::kSosa) + "hasFeatureOfInterest";
  const std::string prop = std::string(vocab::kSosa) + "observedProperty";
  const std::string result = std::string(vocab::kSosa) + "hasSimpleResult";
  const std::string ptime = std::string(vocab::kSosa) + "phenomenonTime";
  for (const Triple& t : triples) {
    if (t.predicate == foi) {
      auto cell = scheme.parse_cell_iri(t.object.lexical);
      if (!cell) continue;
      by_node[t.subject].cell = *cell;
      seen_foi.insert(t.subject);
    } else if (t.predicate == prop) {
      std::string p = t.object.lexical;
      if (p.rfind(scheme.ontology_base, 0) == 0) {
        p = p.substr(scheme.ontology_base.size());
      }
      by_node[t.subject].property = std::move(p);
    } else if (t.predicate == result) {
      by_node[t.subject].value = std::stod(t.object.lexical);
      by_node[t.subject].unit =
          t.object.datatype == std::string(vocab::kXsd) + "integer" ? "count"
                                                                    : "";
    } else if (t.predicate == ptime) {
      by_node[t.subject].phenomenon_time = t.object.lexical;
    }
  }
  std::vector<Observation> out;
  for (auto& [node, o] : by_node) {
    if (!seen_foi.count(node)) continue;
    o.id = node.rfind(scheme.resource_base, 0) == 0
               ? node.substr(scheme.resource_base.size())
               : node;
    if (manifest) {
      if (const PropertyInfo* info = manifest->find(o.property)) {
        o.kind = info->kind;
        o.unit = info->unit;
      } else {
        PropertyInfo fallback = manifest->require(o.property);
        o.kind = fallback.kind;
        o.unit = fallback.unit;
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<Triple> materialize_transitive(std::vector<Triple> triples,
                                           const IriScheme& scheme,
                                           bool include_feature_chains) {
  const std::string within = scheme.relation_iri(Relation::sf_within);
  const std::string contains = scheme.relation_iri(Relation::sf_contains);

  auto is_cell = [&](const std::string& iri) {
    return scheme.parse_cell_iri(iri).has_value();
  };

  // Node interning over the qualifying sfWithin edges.
  std::map<std::string, int> ids;
  std::vector<std::string> names;
  auto intern = [&](const std::string& s) {
    auto [it, fresh] = ids.emplace(s, static_cast<int>(names.size()));
    if (fresh) names.push_back(s);
    return it->second;
  };
  std::vector<std::pair<int, int>> edges;
  for (const Triple& t : triples) {
    if (t.predicate != within || !t.object.iri) continue;
    if (!include_feature_chains && !is_cell(t.subject) &&
        !is_cell(t.object.lexical)) {
      continue;
    }
    edges.push_back({intern(t.subject), intern(t.object.lexical)});
  }

  size_t n = names.size();
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) adj[a].push_back(b);

  // DFS with cycle detection; reach sets memoized per node.
  std::vector<int> state(n, 0);  // 0 new, 1 on stack, 2 done
  std::vector<std::set<int>> reach(n);
  auto dfs = [&](auto&& self, int u) -> void {
    state[u] = 1;
    for (int v : adj[u]) {
      if (state[v] == 1) {
        throw Error("containment cycle through " + names[v]);
      }
      if (state[v] == 0) self(self, v);
      reach[u].insert(v);
      reach[u].insert(reach[v].begin(), reach[v].end());
    }
    state[u] = 2;
  };
  for (size_t u = 0; u < n; ++u) {
    if (state[u] == 0) dfs(dfs, static_cast<int>(u));
  }

  std::set<Triple> result(triples.begin(), triples.end());
  for (size_t u = 0; u < n; ++u) {
    const auto& direct = adj[u];
    for (int v : reach[u]) {
      if (std::find(direct.begin(), direct.end(), v) != direct.end()) continue;
      // Inferred edge plus its inverse; direct edges keep whatever
      // counterparts the emitter produced.
      result.insert({names[u], within, Term::make_iri(names[v])});
      result.insert({names[v], contains, Term::make_iri(names[u])});
    }
  }
  return {result.begin(), result.end()};
}

namespace {

void escape_into(const std::string& s, std::string* out) {
  for (unsigned char c : s) {
    switch (c) {
      case '"': out->append("\\\""); break;
      case '\\': out->append("\\\\"); break;
      case '\n': out->append("\\n"); break;
      case '\r': out->append("\\r"); break;
      case '\t': out->append("\\t"); break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04X", c);
          out->append(buf);
        } else {
          out->push_back(static_cast<char>(c));
        }
    }
  }
}

std::string unescape(std::string_view s, size_t line_no) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out.push_back(s[i]);
      continue;
    }
    if (++i >= s.size()) throw ParseError("dangling escape", line_no);
    switch (s[i]) {
      case '"': out.push_back('"'); break;
      case '\\': out.push_back('\\'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 't': out.push_back('\t'); break;
      case 'u': {
        if (i + 4 >= s.size()) throw ParseError("bad \\u escape", line_no);
        unsigned code = 0;
        auto res = std::from_chars(s.data() + i + 1, s.data() + i + 5, code, 16);
        if (res.ec != std::errc()) throw ParseError("bad \\u escape", line_no);
        out.push_back(static_cast<char>(code));
        i += 4;
        break;
      }
      default:
        throw ParseError("unknown escape", line_no);
    }
  }
  return out;
}

}  // namespace

std::string to_ntriples_line(const Triple& t) {
  std::string out = "<" + t.subject + "> <" + t.predicate + "> ";
  if (t.object.iri) {
    out += "<" + t.object.lexical + ">";
  } else {
    out += "\"";
    escape_into(t.object.lexical, &out);
    out += "\"";
    if (!t.object.datatype.empty()) out += "^^<" + t.object.datatype + ">";
  }
  out += " .";
  return out;
}

void write_ntriples(std::ostream& out, std::span<const Triple> triples) {
  for (const Triple& t : triples) out << to_ntriples_line(t) << "\n";
}

Triple parse_ntriples_line(std::string_view line, size_t line_no) {
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) pos++;
  };
  auto read_iri = [&]() -> std::string {
    skip_ws();
    if (pos >= line.size() || line[pos] != '<') {
      throw ParseError("expected IRI", line_no);
    }
    size_t end = line.find('>', pos);
    if (end == std::string_view::npos) throw ParseError("unterminated IRI", line_no);
    std::string iri(line.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    return iri;
  };

  Triple t;
  t.subject = read_iri();
  t.predicate = read_iri();
  skip_ws();
  if (pos >= line.size()) throw ParseError("missing object", line_no);
  if (line[pos] == '<') {
    t.object = Term::make_iri(read_iri());
  } else if (line[pos] == '"') {
    size_t end = pos + 1;
    while (end < line.size() && line[end] != '"') {
      if (line[end] == '\\') end++;
      end++;
    }
    if (end >= line.size()) throw ParseError("unterminated literal", line_no);
    std::string lex = unescape(line.substr(pos + 1, end - pos - 1), line_no);
    pos = end + 1;
    std::string datatype;
    if (pos + 1 < line.size() && line[pos] == '^' && line[pos + 1] == '^') {
      pos += 2;
      datatype = read_iri();
    } else if (pos < line.size() && line[pos] == '@') {
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') pos++;
    }
    t.object = Term::make_literal(std::move(lex), std::move(datatype));
  } else {
    throw ParseError("expected IRI or literal object", line_no);
  }
  skip_ws();
  if (pos >= line.size() || line[pos] != '.') {
    throw ParseError("statement must end with '.'", line_no);
  }
  return t;
}

std::vector<Triple> read_ntriples(std::istream& in) {
  std::vector<Triple> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    out.push_back(parse_ntriples_line(line, line_no));
  }
  return out;
}

}  // namespace geogrid
