#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "geogrid/cell.hpp"
#include "geogrid/coverer.hpp"
#include "geogrid/rdf.hpp"

namespace geogrid {

/// Location-based shard assignment: shard keys are the cells of a
/// homogeneous covering at `shard_level`; every reference cell belongs to
/// exactly one key (its unique ancestor).
struct ShardMap {
  int shard_level = 2;
  std::vector<CellId> keys;  // sorted, all at shard_level

  /// The single designated shard for a cell: its ancestor key when the
  /// cell is at or below shard level; for a coarser cell, the key of its
  /// first shard-level descendant (observation nodes scoped to a coarse
  /// cell co-locate there).
  std::optional<CellId> shard_of(CellId c) const;

  /// All keys lying under a coarse cell.
  std::vector<CellId> keys_within(CellId c) const;

  std::string to_json() const;
  static ShardMap from_json(std::string_view text);
};

/// Shard keys for a region: its homogeneous covering at shard_level.
ShardMap plan(const SphericalPolygon& region, int shard_level);
ShardMap plan(const MultiPolygon& region, int shard_level);

struct RouteResult {
  std::vector<CellId> shards;      // sorted, unique
  std::vector<CellId> unroutable;  // query cells outside every shard
};

/// Shards whose key is an ancestor of (or equal to) some query cell; a
/// query cell coarser than the shard level routes to every key beneath it.
/// Cells outside all shards are reported, never dropped.
RouteResult route(const Covering& query, const ShardMap& map);

struct SplitStats {
  std::map<std::string, size_t> per_stream;  // stream name -> triple count
  size_t input_triples = 0;
  size_t cross_shard_duplicates = 0;
  size_t remainder = 0;  // triples naming cells outside every shard
};

/// Partition an N-Triples stream by the shard of the cells each triple
/// mentions. Cell-free triples go to "global"; a triple touching cells in
/// two shards is written to both and counted as a cross-shard duplicate.
/// `open_stream` maps a stream name ("shard-<token>", "global",
/// "remainder") to its output.
SplitStats split_triples(
    std::istream& in, const ShardMap& map, const IriScheme& scheme,
    const std::function<std::ostream&(const std::string&)>& open_stream);

}  // namespace geogrid
