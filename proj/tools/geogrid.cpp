// geogrid: discrete-global-grid quantization pipeline.
//
// One binary, one subcommand per pipeline stage; every stage reads files
// or stdin ("-") and writes stdout by default, so stages compose in a
// shell pipe.

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "geogrid/cell.hpp"
#include "geogrid/coverer.hpp"
#include "geogrid/discretize.hpp"
#include "geogrid/enrich.hpp"
#include "geogrid/error.hpp"
#include "geogrid/rdf.hpp"
#include "geogrid/shard.hpp"
#include "geogrid/sphere.hpp"
#include "geogrid/triple_store.hpp"
#include "geogrid/wkt.hpp"

namespace {

constexpr const char* kVersion = "geogrid 0.1.0 (config-schema 1)";

using geogrid::Error;

// Run-wide configuration; file values come from GEOGRID_CONFIG or
// --config (key=value lines), flags override.
struct RunConfig {
  geogrid::IriScheme scheme;
  std::string geometry_policy = "split";
  std::string antimeridian = "split";
  double densify_step = geogrid::kDefaultDensifyStepDeg;
  uint64_t seed = 1;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());

  std::string describe() const {
    std::ostringstream out;
    out << "antimeridian=" << antimeridian
        << " geometry_policy=" << geometry_policy
        << " densify_step=" << densify_step << " seed=" << seed
        << " resource_base=" << scheme.resource_base
        << " ontology_base=" << scheme.ontology_base;
    return out.str();
  }
};

void load_config_file(RunConfig* cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error("config line needs key=value: " + line);
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "resource_base") cfg->scheme.resource_base = value;
    else if (key == "ontology_base") cfg->scheme.ontology_base = value;
    else if (key == "geometry_policy") cfg->geometry_policy = value;
    else if (key == "antimeridian") cfg->antimeridian = value;
    else if (key == "densify_step") cfg->densify_step = std::stod(value);
    else if (key == "seed") cfg->seed = std::stoull(value);
    else throw Error("unknown config key: " + key);
  }
}

// Input path "-" means stdin.
std::unique_ptr<std::istream> open_input(const std::string& path) {
  if (path == "-") {
    return std::make_unique<std::istream>(std::cin.rdbuf());
  }
  auto file = std::make_unique<std::ifstream>(path);
  if (!*file) throw Error("cannot open input: " + path);
  return file;
}

std::unique_ptr<std::ostream> open_output(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::make_unique<std::ostream>(std::cout.rdbuf());
  }
  auto file = std::make_unique<std::ofstream>(path);
  if (!*file) throw Error("cannot open output: " + path);
  return file;
}

// Hex tokens win over decimal ids when a short all-digit string is both.
geogrid::CellId parse_cell_arg(const std::string& arg) {
  if (auto c = geogrid::CellId::from_token(arg)) return *c;
  if (!arg.empty() && std::all_of(arg.begin(), arg.end(), ::isdigit)) {
    geogrid::CellId c(std::stoull(arg));
    if (c.is_valid()) return c;
  }
  throw Error("not a cell token or id: " + arg);
}

geogrid::Region region_from_wkt_file(const std::string& path, double step) {
  auto in = open_input(path);
  std::stringstream buf;
  buf << in->rdbuf();
  std::string text = buf.str();
  // Accept either bare WKT or a single id<TAB>WKT record.
  size_t tab = text.find('\t');
  if (tab != std::string::npos && text.find('(') > tab) {
    text = text.substr(tab + 1);
  }
  geogrid::WktGeometry geom = geogrid::parse_wkt(text);
  if (geom.is_areal()) {
    return geogrid::Region(geogrid::to_spherical(geom, step));
  }
  if (geom.kind == geogrid::WktGeometry::Kind::line_string) {
    return geogrid::Region(
        geogrid::GeodesicChain{geogrid::densify_line(geom.lines[0], step)});
  }
  if (geom.kind == geogrid::WktGeometry::Kind::point) {
    return geogrid::Region(geom.points[0].to_point());
  }
  throw Error("unsupported region geometry");
}

// --- subcommand bodies --------------------------------------------------------

int cmd_cell_info(const std::string& arg, bool as_json) {
  geogrid::CellId c = parse_cell_arg(arg);
  geogrid::LatLng center = c.center_latlng();
  if (as_json) {
    nlohmann::json j;
    j["token"] = c.token();
    j["id"] = std::to_string(c.raw());
    j["face"] = c.face();
    j["level"] = c.level();
    j["center"] = {{"lat", center.lat()}, {"lng", center.lng()}};
    j["area_km2"] = c.area_km2();
    j["crosses_antimeridian"] = geogrid::cell_crosses_antimeridian(c);
    std::cout << j.dump() << "\n";
  } else {
    std::cout << "token " << c.token() << "\nid " << c.raw() << "\nface "
              << c.face() << "\nlevel " << c.level() << "\ncenter "
              << center.lat() << " " << center.lng() << "\narea_km2 "
              << c.area_km2() << "\n";
  }
  return 0;
}

int cmd_cell_children(const std::string& token) {
  geogrid::CellId c = parse_cell_arg(token);
  for (geogrid::CellId kid : c.children()) {
    std::cout << kid.token() << "\n";
  }
  return 0;
}

int cmd_cell_wkt(const RunConfig& cfg, const std::string& token,
                 const std::string& policy) {
  geogrid::CellId c = parse_cell_arg(token);
  std::cout << geogrid::cell_to_wkt(
                   c, geogrid::antimeridian_policy_from_string(
                          policy.empty() ? cfg.antimeridian : policy))
            << "\n";
  return 0;
}

int cmd_wkt_parse(const std::string& input) {
  auto in = open_input(input);
  std::stringstream buf;
  buf << in->rdbuf();
  geogrid::WktGeometry geom = geogrid::parse_wkt(buf.str());
  std::cout << geogrid::to_wkt(geom) << "\n";
  if (geom.antimeridian_crossing) {
    std::cerr << "# antimeridian crossing detected\n";
  }
  return 0;
}

int cmd_cover(const RunConfig& cfg, const std::string& mode, int level,
              int max_cells, int min_level, const std::string& file,
              const std::string& out_path) {
  geogrid::Region region = region_from_wkt_file(file, cfg.densify_step);
  auto out = open_output(out_path);
  *out << "# geogrid cover mode=" << mode << " level=" << level
       << " max-cells=" << max_cells << " | " << cfg.describe() << "\n";
  if (mode == "homogeneous") {
    geogrid::HomogeneousStream stream(region, level);
    while (auto c = stream.next()) *out << c->token() << "\n";
    return 0;
  }
  geogrid::CoveringParams params;
  params.max_level = level;
  params.min_level = mode == "interior" ? min_level : 0;
  params.max_cells = max_cells;
  params.mode = mode == "interior" ? geogrid::CoveringParams::Mode::interior
                                   : geogrid::CoveringParams::Mode::ordinary;
  if (mode != "interior" && mode != "ordinary") {
    throw Error("unknown covering mode: " + mode);
  }
  geogrid::Covering cov =
      mode == "interior" ? geogrid::interior_covering(region, params)
                         : geogrid::covering(region, params);
  for (geogrid::CellId c : cov.cells) *out << c.token() << "\n";
  return 0;
}

int cmd_enrich(const RunConfig& cfg, const std::string& file, int level,
               bool compressed, int min_level, int boundary_level,
               const std::string& format, const std::string& out_path) {
  auto in = open_input(file);
  std::vector<geogrid::WktRecord> records = geogrid::read_wkt_records(*in);

  // Embarrassingly parallel over features; output rejoined in input order.
  std::vector<std::vector<geogrid::RelationRecord>> results(records.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!failed.load()) {
      size_t i = next.fetch_add(1);
      if (i >= records.size()) return;
      try {
        geogrid::Feature f =
            geogrid::make_feature(records[i].id, records[i].geometry);
        if (compressed) {
          geogrid::CompressedParams params;
          params.min_level = min_level;
          params.max_level = level;
          if (boundary_level >= 0) params.boundary_level = boundary_level;
          results[i] = geogrid::enrich_compressed(f, params, cfg.densify_step);
        } else {
          results[i] = geogrid::enrich_feature(
              f, geogrid::ReferenceGrid{level}, cfg.densify_step);
        }
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_message = records[i].id + ": " + e.what();
        failed.store(true);
      }
    }
  };
  int jobs = std::max(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (int t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed.load()) throw Error(error_message);

  auto out = open_output(out_path);
  if (format == "ntriples") {
    for (const auto& rs : results) {
      geogrid::write_ntriples(*out, geogrid::emit_relations(rs, cfg.scheme));
    }
  } else {
    for (const auto& rs : results) {
      for (const auto& r : rs) *out << geogrid::to_tsv(r) << "\n";
    }
  }
  return 0;
}

std::string observation_tsv(const geogrid::Observation& o) {
  char value[32];
  std::snprintf(value, sizeof(value), "%.17g", o.value);
  std::ostringstream line;
  line << o.cell.token() << "\t" << o.property << "\t" << value << "\t"
       << o.unit << "\t" << o.phenomenon_time << "\t"
       << geogrid::to_string(o.kind);
  return line.str();
}

geogrid::PropertyManifest load_manifest(const std::string& path,
                                        const std::string& default_property,
                                        const std::string& default_unit) {
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest: " + path);
    return geogrid::PropertyManifest::from_tsv(in);
  }
  geogrid::PropertyManifest m;
  m.add(default_property, geogrid::QuantityKind::mereotopological,
        default_unit);
  return m;
}

int cmd_discretize_vector(const RunConfig& cfg, const std::string& file,
                          int level, const std::string& property,
                          const std::string& manifest_path,
                          const std::string& time,
                          const std::string& out_path) {
  auto in = open_input(file);
  auto records = geogrid::read_wkt_records(*in);
  geogrid::PropertyManifest manifest =
      load_manifest(manifest_path, property, "km2");
  auto out = open_output(out_path);
  *out << "# geogrid discretize vector property=" << property
       << " level=" << level << " time=" << time << " | " << cfg.describe()
       << "\n";
  for (const auto& rec : records) {
    geogrid::Feature f = geogrid::make_feature(rec.id, rec.geometry);
    for (const auto& o :
         geogrid::discretize_vector(f, geogrid::ReferenceGrid{level}, property,
                                    manifest, time, cfg.densify_step)) {
      *out << observation_tsv(o) << "\n";
    }
  }
  return 0;
}

int cmd_discretize_raster(const RunConfig& cfg, const std::string& file,
                          int level, const std::string& stat,
                          const std::string& property,
                          const std::string& manifest_path,
                          const std::string& time,
                          const std::string& out_path) {
  std::string crs = "EPSG:4326";
  std::ifstream sidecar(file + ".json");
  if (sidecar) {
    nlohmann::json j = nlohmann::json::parse(sidecar, nullptr, false);
    if (!j.is_discarded() && j.contains("crs")) {
      crs = j["crs"].get<std::string>();
    }
  }
  auto in = open_input(file);
  geogrid::RasterGrid grid = geogrid::RasterGrid::read_ascii_grid(*in, crs);

  geogrid::PropertyManifest manifest = load_manifest(
      manifest_path, property, stat == "percent" ? "percent" : "value");
  auto out = open_output(out_path);
  *out << "# geogrid discretize raster stat=" << stat
       << " property=" << property << " level=" << level << " time=" << time
       << " | " << cfg.describe() << "\n";
  for (const auto& o : geogrid::discretize_raster(
           grid, geogrid::ReferenceGrid{level},
           geogrid::raster_stat_from_string(stat), property, manifest, time)) {
    *out << observation_tsv(o) << "\n";
  }
  return 0;
}

geogrid::Observation observation_from_tsv(const std::string& line) {
  std::istringstream row(line);
  std::string token, property, value, unit, time, kind;
  if (!std::getline(row, token, '\t') || !std::getline(row, property, '\t') ||
      !std::getline(row, value, '\t') || !std::getline(row, unit, '\t') ||
      !std::getline(row, time, '\t')) {
    throw Error("bad observation line: " + line);
  }
  std::getline(row, kind);
  geogrid::Observation o;
  auto cell = geogrid::CellId::from_token(token);
  if (!cell) throw Error("bad cell token: " + token);
  o.cell = *cell;
  o.property = property;
  o.value = std::stod(value);
  o.unit = unit;
  o.phenomenon_time = time;
  o.id = property + "." + token + "." + time;
  if (!kind.empty()) o.kind = geogrid::quantity_kind_from_string(kind);
  return o;
}

int cmd_emit(const RunConfig& cfg, const std::string& file,
             const std::string& kind, bool emit_cells, bool closure,
             const std::string& out_path) {
  auto in = open_input(file);
  std::vector<geogrid::Triple> triples;
  std::set<geogrid::CellId> cells;

  std::string line;
  std::vector<geogrid::RelationRecord> records;
  while (std::getline(*in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (kind == "observations") {
      geogrid::Observation o = observation_from_tsv(line);
      auto obs_triples = geogrid::emit_observation(o, cfg.scheme);
      triples.insert(triples.end(), obs_triples.begin(), obs_triples.end());
      cells.insert(o.cell);
    } else {
      geogrid::RelationRecord r = geogrid::record_from_tsv(line);
      records.push_back(r);
      if (r.subject.is_cell()) cells.insert(r.subject.cell);
      if (r.object.is_cell()) cells.insert(r.object.cell);
    }
  }
  if (!records.empty()) {
    auto rel_triples = geogrid::emit_relations(records, cfg.scheme);
    triples.insert(triples.end(), rel_triples.begin(), rel_triples.end());
  }
  if (emit_cells) {
    auto policy = geogrid::geometry_policy_from_string(cfg.geometry_policy);
    for (geogrid::CellId c : cells) {
      auto cell_triples = geogrid::emit_cell(c, cfg.scheme, policy);
      triples.insert(triples.end(), cell_triples.begin(), cell_triples.end());
    }
  }
  if (closure) {
    triples = geogrid::materialize_transitive(std::move(triples), cfg.scheme);
  }
  auto out = open_output(out_path);
  *out << "# geogrid emit | " << cfg.describe() << "\n";
  geogrid::write_ntriples(*out, triples);
  return 0;
}

int cmd_query(const RunConfig& cfg, const std::string& file,
              const std::string& path_text, const std::string& bind_start,
              const std::string& bind_end, const std::string& filter) {
  auto in = open_input(file);
  geogrid::TripleStore store = geogrid::TripleStore::load(*in);
  geogrid::PathQuery q = geogrid::parse_path(path_text, cfg.scheme);
  if (!bind_start.empty()) q.start = bind_start;
  if (!bind_end.empty()) q.end = bind_end;
  auto pairs = geogrid::eval_path(store, q);

  if (!filter.empty()) {
    // "predicate OP value", e.g. "hasM2Area >= 1000000".
    std::istringstream f(filter);
    std::string pred, op, value;
    f >> pred >> op;
    std::getline(f, value);
    value.erase(0, value.find_first_not_of(' '));
    if (pred.find("://") == std::string::npos) pred = cfg.scheme.ontology(pred);
    geogrid::LiteralCmp cmp;
    if (op == "=" || op == "==") cmp = geogrid::LiteralCmp::eq;
    else if (op == "!=") cmp = geogrid::LiteralCmp::ne;
    else if (op == "<") cmp = geogrid::LiteralCmp::lt;
    else if (op == "<=") cmp = geogrid::LiteralCmp::le;
    else if (op == ">") cmp = geogrid::LiteralCmp::gt;
    else if (op == ">=") cmp = geogrid::LiteralCmp::ge;
    else throw Error("unknown filter operator: " + op);
    std::vector<std::string> ends;
    ends.reserve(pairs.size());
    for (auto& [s, e] : pairs) ends.push_back(e);
    auto kept = geogrid::filter_by_literal(store, ends, pred, cmp, value);
    std::set<std::string> keep(kept.begin(), kept.end());
    std::erase_if(pairs,
                  [&](const auto& pr) { return !keep.count(pr.second); });
  }
  for (auto& [s, e] : pairs) std::cout << s << "\t" << e << "\n";
  return 0;
}

int cmd_bench(const RunConfig& cfg, int points, int regions, int level,
              uint64_t seed, int runs, const std::string& out_path) {
  geogrid::BenchSpec spec;
  spec.n_points = points;
  spec.m_regions = regions;
  spec.level = level;
  spec.seed = seed;
  spec.runs = runs;
  geogrid::BenchReport r = geogrid::bench_compare(spec);
  nlohmann::json j;
  j["config"] = cfg.describe();
  j["spec"] = {{"points", points},
               {"regions", regions},
               {"level", level},
               {"seed", seed},
               {"runs", runs}};
  j["store_triples"] = r.store_triples;
  j["build_ms"] = r.build_ms;
  j["points_in_region"] = {
      {"enriched_ms", r.enriched_ms},
      {"geometric_ms", r.geometric_ms},
      {"speedup", r.geometric_ms / std::max(1e-9, r.enriched_ms)},
      {"enriched_results", r.enriched_results},
      {"geometric_results", r.geometric_results},
      {"mismatches", r.mismatches.size()},
      {"mismatches_boundary_adjacent", r.mismatches_boundary_adjacent},
      {"mismatch_items", r.mismatches},
  };
  j["region_overlaps"] = {
      {"enriched_ms", r.enriched_aa_ms},
      {"geometric_ms", r.geometric_aa_ms},
      {"speedup", r.geometric_aa_ms / std::max(1e-9, r.enriched_aa_ms)},
      {"enriched_results", r.enriched_aa_results},
      {"geometric_results", r.geometric_aa_results},
      {"mismatches", r.aa_mismatches.size()},
      {"mismatches_boundary_adjacent", r.aa_mismatches_boundary_adjacent},
      {"mismatch_items", r.aa_mismatches},
  };
  auto out = open_output(out_path);
  *out << j.dump(2) << "\n";
  return 0;
}

int cmd_shard_plan(const RunConfig& cfg, const std::string& file, int level,
                   const std::string& out_path) {
  geogrid::Region region = region_from_wkt_file(file, cfg.densify_step);
  geogrid::ShardMap map;
  map.shard_level = level;
  map.keys = geogrid::homogeneous_covering(region, level);
  std::sort(map.keys.begin(), map.keys.end());
  auto out = open_output(out_path);
  *out << map.to_json() << "\n";
  return 0;
}

int cmd_shard_split(const RunConfig& cfg, const std::string& map_path,
                    const std::string& file, const std::string& out_dir) {
  std::ifstream map_in(map_path);
  if (!map_in) throw Error("cannot open shard map: " + map_path);
  std::stringstream buf;
  buf << map_in.rdbuf();
  geogrid::ShardMap map = geogrid::ShardMap::from_json(buf.str());

  std::map<std::string, std::ofstream> streams;
  auto open_stream = [&](const std::string& name) -> std::ostream& {
    auto it = streams.find(name);
    if (it == streams.end()) {
      std::string path = out_dir + "/" + name + ".nt";
      it = streams.emplace(name, std::ofstream(path)).first;
      if (!it->second) throw Error("cannot open " + path);
    }
    return it->second;
  };
  auto in = open_input(file);
  geogrid::SplitStats stats =
      geogrid::split_triples(*in, map, cfg.scheme, open_stream);
  nlohmann::json j;
  j["input_triples"] = stats.input_triples;
  j["cross_shard_duplicates"] = stats.cross_shard_duplicates;
  j["remainder"] = stats.remainder;
  j["per_stream"] = stats.per_stream;
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S2-grid quantization pipeline: cells, coverings, enrichment, "
               "discretization, triples, query, shards"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;
  if (const char* env = std::getenv("GEOGRID_CONFIG")) config_path = env;
  app.add_option("--config", config_path, "key=value config file");
  app.add_option("--jobs", cfg.jobs, "worker threads for per-feature stages");
  app.add_option("--seed", cfg.seed, "deterministic seed");
  app.add_option("--base", cfg.scheme.resource_base, "resource IRI base");
  app.add_option("--ontology-base", cfg.scheme.ontology_base,
                 "ontology IRI base");
  app.add_option("--densify-step", cfg.densify_step,
                 "max lat/lng edge step in degrees");

  std::function<int()> action;

  // cell
  auto* cell = app.add_subcommand("cell", "cell inspection");
  cell->require_subcommand(1);
  static std::string info_arg;
  static bool info_json = false;
  auto* info = cell->add_subcommand("info", "face/level/center/area");
  info->add_option("cell", info_arg, "token or decimal id")->required();
  info->add_flag("--json", info_json, "JSON output");
  info->callback(
      [&] { action = [&] { return cmd_cell_info(info_arg, info_json); }; });

  static std::string children_arg;
  auto* children = cell->add_subcommand("children", "four child tokens");
  children->add_option("token", children_arg)->required();
  children->callback(
      [&] { action = [&] { return cmd_cell_children(children_arg); }; });

  static std::string cellwkt_arg, cellwkt_policy;
  auto* cellwkt = cell->add_subcommand("wkt", "cell boundary as WKT");
  cellwkt->add_option("token", cellwkt_arg)->required();
  cellwkt->add_option("--antimeridian", cellwkt_policy, "split|reject|point");
  cellwkt->callback([&] {
    action = [&] { return cmd_cell_wkt(cfg, cellwkt_arg, cellwkt_policy); };
  });

  // wkt
  auto* wkt = app.add_subcommand("wkt", "WKT utilities");
  wkt->require_subcommand(1);
  static std::string wktparse_arg = "-";
  auto* wktparse = wkt->add_subcommand("parse", "parse and normalize WKT");
  wktparse->add_option("input", wktparse_arg, "file or - for stdin");
  wktparse->callback(
      [&] { action = [&] { return cmd_wkt_parse(wktparse_arg); }; });

  static std::string wktcell_arg, wktcell_policy;
  auto* wktcell = wkt->add_subcommand("cell", "serialize a cell as WKT");
  wktcell->add_option("token", wktcell_arg)->required();
  wktcell->add_option("--antimeridian", wktcell_policy, "split|reject|point");
  wktcell->callback([&] {
    action = [&] { return cmd_cell_wkt(cfg, wktcell_arg, wktcell_policy); };
  });

  // cover
  static std::string cover_mode = "ordinary", cover_file, cover_out;
  static int cover_level = 13, cover_max_cells = 8, cover_min_level = 0;
  auto* cover = app.add_subcommand("cover", "cell covering of a region");
  cover->add_option("--mode", cover_mode, "ordinary|homogeneous|interior");
  cover->add_option("--level", cover_level, "target level")->required();
  cover->add_option("--max-cells", cover_max_cells);
  cover->add_option("--min-level", cover_min_level);
  cover->add_option("wkt_file", cover_file, "region WKT file or -")->required();
  cover->add_option("--out", cover_out);
  cover->callback([&] {
    action = [&] {
      return cmd_cover(cfg, cover_mode, cover_level, cover_max_cells,
                       cover_min_level, cover_file, cover_out);
    };
  });

  // enrich
  static std::string enrich_file, enrich_format = "tsv", enrich_out;
  static int enrich_level = 13, enrich_min_level = 3, enrich_boundary = -1;
  static bool enrich_compressed_flag = false;
  auto* enrich = app.add_subcommand(
      "enrich", "topological relations between features and cells");
  enrich->add_option("--level", enrich_level, "reference grid level");
  enrich->add_flag("--compressed", enrich_compressed_flag,
                   "multi-level enrichment");
  enrich->add_option("--min-level", enrich_min_level);
  enrich->add_option("--boundary-level", enrich_boundary,
                     "emit overlaps only at this level");
  enrich->add_option("--format", enrich_format, "tsv|ntriples");
  enrich->add_option("features", enrich_file, "id<TAB>WKT file or -")
      ->required();
  enrich->add_option("--out", enrich_out);
  enrich->callback([&] {
    action = [&] {
      return cmd_enrich(cfg, enrich_file, enrich_level, enrich_compressed_flag,
                        enrich_min_level, enrich_boundary, enrich_format,
                        enrich_out);
    };
  });

  // discretize
  auto* discretize = app.add_subcommand("discretize", "grid observations");
  discretize->require_subcommand(1);
  static std::string dv_file, dv_property = "overlap", dv_manifest,
                     dv_time = "2023", dv_out;
  static int dv_level = 13;
  auto* dvec = discretize->add_subcommand("vector", "overlap areas");
  dvec->add_option("features", dv_file)->required();
  dvec->add_option("--level", dv_level);
  dvec->add_option("--property", dv_property);
  dvec->add_option("--manifest", dv_manifest, "property<TAB>kind<TAB>unit TSV");
  dvec->add_option("--time", dv_time);
  dvec->add_option("--out", dv_out);
  dvec->callback([&] {
    action = [&] {
      return cmd_discretize_vector(cfg, dv_file, dv_level, dv_property,
                                   dv_manifest, dv_time, dv_out);
    };
  });

  static std::string dr_file, dr_stat = "percent", dr_property = "landcover",
                     dr_manifest, dr_time = "2023", dr_out;
  static int dr_level = 13;
  auto* dras = discretize->add_subcommand("raster", "pixel aggregation");
  dras->add_option("grid", dr_file, "ESRI ASCII grid (+ .json sidecar)")
      ->required();
  dras->add_option("--level", dr_level);
  dras->add_option("--stat", dr_stat, "percent|mean|sum");
  dras->add_option("--property", dr_property);
  dras->add_option("--manifest", dr_manifest);
  dras->add_option("--time", dr_time);
  dras->add_option("--out", dr_out);
  dras->callback([&] {
    action = [&] {
      return cmd_discretize_raster(cfg, dr_file, dr_level, dr_stat,
                                   dr_property, dr_manifest, dr_time, dr_out);
    };
  });

  // emit
  static std::string emit_file = "-", emit_kind = "records", emit_out;
  static bool emit_cells_flag = false, emit_closure = false;
  auto* emit = app.add_subcommand("emit", "materialize N-Triples");
  emit->add_option("input", emit_file, "records/observations TSV or -");
  emit->add_option("--kind", emit_kind, "records|observations");
  emit->add_flag("--cells", emit_cells_flag, "also emit cell nodes");
  emit->add_flag("--closure", emit_closure,
                 "forward-chain transitive sfWithin");
  emit->add_option("--out", emit_out);
  emit->callback([&] {
    action = [&] {
      return cmd_emit(cfg, emit_file, emit_kind, emit_cells_flag, emit_closure,
                      emit_out);
    };
  });

  // query
  static std::string q_file = "-", q_path, q_start, q_end, q_filter;
  auto* query = app.add_subcommand("query", "path query over N-Triples");
  query->add_option("--in", q_file, "N-Triples file or -");
  query->add_option("--path", q_path, "p1/p2* path; <>-wrap full IRIs")
      ->required();
  query->add_option("--bind-start", q_start);
  query->add_option("--bind-end", q_end);
  query->add_option("--filter", q_filter, "\"predicate OP value\"");
  query->callback([&] {
    action = [&] {
      return cmd_query(cfg, q_file, q_path, q_start, q_end, q_filter);
    };
  });

  // bench
  static int b_points = 50000, b_regions = 100, b_level = 13, b_runs = 5;
  static uint64_t b_seed = 1;
  static std::string b_out;
  auto* bench =
      app.add_subcommand("bench", "materialized joins vs geometric scan");
  bench->add_option("--points", b_points);
  bench->add_option("--regions", b_regions);
  bench->add_option("--level", b_level);
  bench->add_option("--seed", b_seed);
  bench->add_option("--runs", b_runs);
  bench->add_option("--out", b_out);
  bench->callback([&] {
    action = [&] {
      return cmd_bench(cfg, b_points, b_regions, b_level, b_seed, b_runs,
                       b_out);
    };
  });

  // shard
  auto* shard = app.add_subcommand("shard", "location-based graph sharding");
  shard->require_subcommand(1);
  static std::string sp_file, sp_out;
  static int sp_level = 2;
  auto* splan = shard->add_subcommand("plan", "shard keys for a region");
  splan->add_option("--level", sp_level, "shard level");
  splan->add_option("region", sp_file, "region WKT file or -")->required();
  splan->add_option("--out", sp_out);
  splan->callback([&] {
    action = [&] { return cmd_shard_plan(cfg, sp_file, sp_level, sp_out); };
  });

  static std::string ss_map, ss_file = "-", ss_dir = ".";
  auto* ssplit = shard->add_subcommand("split", "partition an N-Triples file");
  ssplit->add_option("--map", ss_map, "shard map JSON")->required();
  ssplit->add_option("input", ss_file, "N-Triples file or -");
  ssplit->add_option("--out-dir", ss_dir);
  ssplit->callback([&] {
    action = [&] { return cmd_shard_split(cfg, ss_map, ss_file, ss_dir); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    std::cout << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (!config_path.empty()) load_config_file(&cfg, config_path);
    return action ? action() : 2;
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    std::cerr << err.dump() << "\n";
    return 1;
  }
}
