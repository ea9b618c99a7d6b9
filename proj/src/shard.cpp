#include "geogrid/shard.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "geogrid/error.hpp"

namespace geogrid {

std::optional<CellId> ShardMap::shard_of(CellId c) const {
  if (!c.is_valid()) return std::nullopt;
  CellId probe = c.level() >= shard_level ? c.parent(shard_level)
                                          : c.child_begin(shard_level);
  if (std::binary_search(keys.begin(), keys.end(), probe)) return probe;
  if (c.level() < shard_level) {
    // Any key under the coarse cell will do as the designated home.
    auto lo = std::lower_bound(keys.begin(), keys.end(), c.range_min());
    if (lo != keys.end() && c.contains(*lo)) return *lo;
  }
  return std::nullopt;
}

std::vector<CellId> ShardMap::keys_within(CellId c) const {
  std::vector<CellId> out;
  auto lo = std::lower_bound(keys.begin(), keys.end(), c.range_min());
  for (auto it = lo; it != keys.end() && c.contains(*it); ++it) {
    out.push_back(*it);
  }
  return out;
}

std::string ShardMap::to_json() const {
  nlohmann::json j;
  j["shard_level"] = shard_level;
  std::vector<std::string> tokens;
  for (CellId c : keys) tokens.push_back(c.token());
  j["keys"] = tokens;
  return j.dump();
}

ShardMap ShardMap::from_json(std::string_view text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.contains("shard_level") || !j.contains("keys")) {
    throw Error("bad shard map json");
  }
  ShardMap map;
  map.shard_level = j["shard_level"].get<int>();
  for (const auto& tok : j["keys"]) {
    auto c = CellId::from_token(tok.get<std::string>());
    if (!c || c->level() != map.shard_level) {
      throw Error("shard key is not a level-" +
                  std::to_string(map.shard_level) + " cell");
    }
    map.keys.push_back(*c);
  }
  std::sort(map.keys.begin(), map.keys.end());
  return map;
}

namespace {

ShardMap plan_region(const Region& region, int shard_level) {
  ShardMap map;
  map.shard_level = shard_level;
  map.keys = homogeneous_covering(region, shard_level);
  std::sort(map.keys.begin(), map.keys.end());
  if (map.keys.empty()) throw Error("region produced no shard keys");
  return map;
}

}  // namespace

ShardMap plan(const SphericalPolygon& region, int shard_level) {
  Region r(region);
  return plan_region(r, shard_level);
}

ShardMap plan(const MultiPolygon& region, int shard_level) {
  Region r(region);
  return plan_region(r, shard_level);
}

RouteResult route(const Covering& query, const ShardMap& map) {
  std::set<CellId> shards;
  RouteResult out;
  for (CellId q : query.cells) {
    if (q.level() >= map.shard_level) {
      CellId key = q.parent(map.shard_level);
      if (std::binary_search(map.keys.begin(), map.keys.end(), key)) {
        shards.insert(key);
      } else {
        out.unroutable.push_back(q);
      }
    } else {
      std::vector<CellId> under = map.keys_within(q);
      if (under.empty()) {
        out.unroutable.push_back(q);
      } else {
        shards.insert(under.begin(), under.end());
      }
    }
  }
  out.shards.assign(shards.begin(), shards.end());
  return out;
}

SplitStats split_triples(
    std::istream& in, const ShardMap& map, const IriScheme& scheme,
    const std::function<std::ostream&(const std::string&)>& open_stream) {
  SplitStats stats;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    line_no++;
    size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    Triple t = parse_ntriples_line(line, line_no);
    stats.input_triples++;

    std::vector<CellId> cells;
    if (auto c = scheme.parse_cell_iri(t.subject)) cells.push_back(*c);
    if (t.object.iri) {
      if (auto c = scheme.parse_cell_iri(t.object.lexical)) {
        cells.push_back(*c);
      }
    }

    if (cells.empty()) {
      open_stream("global") << line << "\n";
      stats.per_stream["global"]++;
      continue;
    }
    std::set<CellId> targets;
    for (CellId c : cells) {
      if (auto shard = map.shard_of(c)) targets.insert(*shard);
    }
    if (targets.empty()) {
      open_stream("remainder") << line << "\n";
      stats.per_stream["remainder"]++;
      stats.remainder++;
      continue;
    }
    size_t copies = 0;
    for (CellId shard : targets) {
      std::string name = "shard-" + shard.token();
      open_stream(name) << line << "\n";
      stats.per_stream[name]++;
      copies++;
    }
    stats.cross_shard_duplicates += copies - 1;
  }
  return stats;
}

}  // namespace geogrid
