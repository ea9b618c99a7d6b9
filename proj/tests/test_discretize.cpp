#include "geogrid/discretize.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include <doctest.h>

#include "geogrid/sphere.hpp"
#include "geogrid/wkt.hpp"

using namespace geogrid;

namespace {

PropertyManifest test_manifest() {
  PropertyManifest m;
  m.add("soilOverlap", QuantityKind::mereotopological, "km2");
  m.add("cropland", QuantityKind::mereotopological, "percent");
  m.add("elevation", QuantityKind::arithmetic, "m");
  m.add("svi", QuantityKind::arithmetic, "index");
  return m;
}

}  // namespace

TEST_CASE("manifest tsv parsing and category fallback") {
  std::istringstream in(
      "soilOverlap\tmereotopological\tkm2\n"
      "# comment\n"
      "svi\tarithmetic\tindex\n");
  PropertyManifest m = PropertyManifest::from_tsv(in);
  CHECK(m.require("soilOverlap").unit == "km2");
  CHECK(m.require("soilOverlap/12").kind == QuantityKind::mereotopological);
  CHECK_THROWS_AS(m.require("unknown"), Error);

  std::istringstream bad("propertyonly\n");
  CHECK_THROWS_AS(PropertyManifest::from_tsv(bad), ParseError);
}

TEST_CASE("fully contained cells observe their whole area") {
  Feature f = make_feature(
      "unit", parse_wkt("POLYGON((13.0 50.0, 13.6 50.0, 13.6 50.6, 13.0 50.6, "
                        "13.0 50.0))"));
  auto obs = discretize_vector(f, ReferenceGrid{12}, "soilOverlap",
                               test_manifest(), "2023");
  REQUIRE(!obs.empty());
  MultiPolygon poly = to_spherical(f.geometry);
  int full = 0;
  for (const Observation& o : obs) {
    CHECK(o.unit == "km2");
    CHECK(o.value > 0);
    if (relate_cell(poly, o.cell) == CellRelation::contains_cell) {
      full++;
      CHECK(o.value == doctest::Approx(o.cell.area_km2()).epsilon(1e-9));
    }
  }
  CHECK(full > 0);
}

TEST_CASE("overlap observations conserve the source area") {
  Feature f = make_feature(
      "blob", parse_wkt("POLYGON((-3.0 40.0, -2.2 40.1, -2.0 40.8, -2.6 41.0, "
                        "-3.2 40.6, -3.0 40.0))"));
  auto obs = discretize_vector(f, ReferenceGrid{11}, "soilOverlap",
                               test_manifest(), "2023");
  double total = 0;
  for (const Observation& o : obs) total += o.value;
  double want =
      area_sr(to_spherical(f.geometry)) * kEarthRadiusKm * kEarthRadiusKm;
  CHECK(total == doctest::Approx(want).epsilon(0.005));
}

TEST_CASE("disconnected pieces in one cell sum to a single observation") {
  // Two small squares inside the same level-8 cell.
  CellId host = CellId::from_latlng(LatLng(45.0, 7.0), 8);
  LatLng c = host.center_latlng();
  char wkt[512];
  std::snprintf(wkt, sizeof(wkt),
                "MULTIPOLYGON(((%f %f, %f %f, %f %f, %f %f, %f %f)), "
                "((%f %f, %f %f, %f %f, %f %f, %f %f)))",
                c.lng() - 0.05, c.lat() - 0.05, c.lng() - 0.01, c.lat() - 0.05,
                c.lng() - 0.01, c.lat() - 0.01, c.lng() - 0.05, c.lat() - 0.01,
                c.lng() - 0.05, c.lat() - 0.05,
                c.lng() + 0.01, c.lat() + 0.01, c.lng() + 0.05, c.lat() + 0.01,
                c.lng() + 0.05, c.lat() + 0.05, c.lng() + 0.01, c.lat() + 0.05,
                c.lng() + 0.01, c.lat() + 0.01);
  Feature f = make_feature("pieces", parse_wkt(wkt));
  auto obs = discretize_vector(f, ReferenceGrid{8}, "soilOverlap",
                               test_manifest(), "2023");
  REQUIRE(obs.size() == 1);
  CHECK(obs[0].cell == host);
  double want =
      area_sr(to_spherical(f.geometry)) * kEarthRadiusKm * kEarthRadiusKm;
  CHECK(obs[0].value == doctest::Approx(want).epsilon(0.005));
}

TEST_CASE("ascii grid parsing") {
  std::istringstream in(
      "ncols 3\nnrows 2\nxllcorner -100.0\nyllcorner 40.0\n"
      "cellsize 0.5\nNODATA_value -9999\n"
      "1 2 3\n4 -9999 6\n");
  RasterGrid g = RasterGrid::read_ascii_grid(in, "EPSG:4326");
  CHECK(g.ncols == 3);
  CHECK(g.at(1, 1) == -9999);
  // First row is the north row.
  LatLng nw = g.pixel_center(0, 0);
  CHECK(nw.lat() == doctest::Approx(40.75));
  CHECK(nw.lng() == doctest::Approx(-99.75));

  std::istringstream projected("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\n"
                               "cellsize 1\n5\n");
  CHECK_THROWS_AS(RasterGrid::read_ascii_grid(projected, "EPSG:3857"), Error);

  std::istringstream short_data(
      "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n");
  CHECK_THROWS_AS(RasterGrid::read_ascii_grid(short_data, "EPSG:4326"), Error);
}

TEST_CASE("uniform raster gives 100 percent everywhere") {
  RasterGrid g;
  g.nrows = g.ncols = 120;
  g.xll = 10.0;
  g.yll = 47.0;
  g.cell_size = 0.005;
  g.values.assign(g.nrows * g.ncols, 7.0);
  auto obs = discretize_raster(g, ReferenceGrid{10},
                               RasterStat::percent_by_category, "cropland",
                               test_manifest(), "2023");
  REQUIRE(!obs.empty());
  for (const Observation& o : obs) {
    CHECK(o.property == "cropland/7");
    CHECK(o.value == 100.0);
    CHECK(o.phenomenon_time == "2023");
  }
}

TEST_CASE("category percentages sum to 100 per cell") {
  std::mt19937_64 rng(99);
  RasterGrid g;
  g.nrows = g.ncols = 200;
  g.xll = -88.0;
  g.yll = 41.0;
  g.cell_size = 0.003;
  g.nodata = -1;
  std::uniform_int_distribution<int> cat(0, 5);
  for (size_t k = 0; k < g.nrows * g.ncols; ++k) {
    int v = cat(rng);
    g.values.push_back(v == 5 ? -1 : v);  // some nodata holes
  }
  auto obs = discretize_raster(g, ReferenceGrid{11},
                               RasterStat::percent_by_category, "cropland",
                               test_manifest(), "2021");
  std::map<CellId, double> sums;
  for (const Observation& o : obs) sums[o.cell] += o.value;
  REQUIRE(!sums.empty());
  for (const auto& [cell, total] : sums) {
    CHECK(total == doctest::Approx(100.0).epsilon(0.001));
  }
}

TEST_CASE("checkerboard raster averages out inside cells") {
  RasterGrid g;
  g.nrows = g.ncols = 400;
  g.xll = 5.0;
  g.yll = 50.0;
  g.cell_size = 0.002;
  for (size_t r = 0; r < g.nrows; ++r) {
    for (size_t c = 0; c < g.ncols; ++c) {
      g.values.push_back(static_cast<double>((r + c) % 2));
    }
  }
  auto obs = discretize_raster(g, ReferenceGrid{10},
                               RasterStat::percent_by_category, "cropland",
                               test_manifest(), "2020");
  // Restrict to interior cells: those fully covered by the footprint.
  SphericalPolygon footprint = raster_footprint(g);
  int interior = 0;
  for (const Observation& o : obs) {
    if (relate_cell(footprint, o.cell) != CellRelation::contains_cell) continue;
    interior++;
    CHECK(o.value == doctest::Approx(50.0).epsilon(0.04));
  }
  CHECK(interior > 10);
}

TEST_CASE("mean and sum statistics") {
  RasterGrid g;
  g.nrows = 1;
  g.ncols = 4;
  g.xll = 0.0;
  g.yll = 0.0;
  g.cell_size = 0.001;  // all four pixels in one level-8 cell
  g.values = {1, 2, 3, -9999};
  auto mean_obs = discretize_raster(g, ReferenceGrid{8}, RasterStat::mean,
                                    "elevation", test_manifest(), "2019");
  REQUIRE(mean_obs.size() == 1);
  CHECK(mean_obs[0].value == doctest::Approx(2.0));
  CHECK(mean_obs[0].kind == QuantityKind::arithmetic);
  auto sum_obs = discretize_raster(g, ReferenceGrid{8}, RasterStat::sum,
                                   "elevation", test_manifest(), "2019");
  CHECK(sum_obs[0].value == doctest::Approx(6.0));
}

TEST_CASE("roll-up sums sibling values and is level-associative") {
  CellId top = CellId::from_latlng(LatLng(33.0, -97.0), 11);
  std::vector<Observation> obs;
  double want = 0;
  for (CellId c13 = top.child_begin(13); c13 < top.child_end(13);
       c13 = c13.next()) {
    Observation o;
    o.cell = c13;
    o.property = "soilOverlap";
    o.value = 0.25 * static_cast<double>(c13.raw() % 17);
    o.unit = "km2";
    o.phenomenon_time = "2023";
    o.kind = QuantityKind::mereotopological;
    want += o.value;
    obs.push_back(o);
  }

  auto direct = roll_up(obs, 11);
  REQUIRE(direct.size() == 1);
  CHECK(direct[0].cell == top);
  CHECK(direct[0].value == doctest::Approx(want).epsilon(1e-12));

  auto stepped = roll_up(roll_up(obs, 12), 11);
  REQUIRE(stepped.size() == 1);
  CHECK(stepped[0].value == doctest::Approx(direct[0].value).epsilon(1e-12));

  // Four siblings sum into their parent.
  auto level12 = roll_up(obs, 12);
  CHECK(level12.size() == 4);
}

TEST_CASE("roll-up refuses arithmetic quantities with a typed error") {
  Observation o;
  o.cell = CellId::from_latlng(LatLng(30, -90), 13);
  o.property = "svi";
  o.value = 0.8;
  o.kind = QuantityKind::arithmetic;
  CHECK_THROWS_AS(roll_up({o}, 12), ArithmeticAggregationError);
}

TEST_CASE("roll-up validates levels") {
  Observation a, b;
  a.cell = CellId::from_latlng(LatLng(30, -90), 13);
  b.cell = CellId::from_latlng(LatLng(31, -91), 12);
  a.kind = b.kind = QuantityKind::mereotopological;
  CHECK_THROWS_AS(roll_up({a, b}, 11), Error);
  CHECK_THROWS_AS(roll_up({a}, 13), Error);
}

TEST_CASE("weighted aggregate basics") {
  CellId top = CellId::from_latlng(LatLng(52.0, 13.0), 8);
  std::vector<Observation> obs;
  int k = 0;
  for (CellId c : top.children()) {
    Observation o;
    o.cell = c;
    o.value = static_cast<double>(++k);  // 1, 2, 3, 4
    obs.push_back(o);
  }
  Covering region{{top}, {}};
  CHECK(weighted_aggregate(obs, region, [](CellId) { return 1.0; }) ==
        doctest::Approx(2.5));
  CHECK(weighted_aggregate(obs, region, [&](CellId c) {
          return c == top.child(2) ? 3.0 : 0.0;
        }) == doctest::Approx(3.0));
  Covering far{{CellId::from_latlng(LatLng(-20, 100), 8)}, {}};
  CHECK_THROWS_AS(
      weighted_aggregate(obs, far, [](CellId) { return 1.0; }), Error);
}

TEST_CASE("area-weighted aggregate matches a fine quadrature oracle") {
  // Synthetic gradient field f(p) = sin(lat), observed at level 8 cells of
  // one level-5 host; compare against level-11 quadrature.
  CellId host = CellId::from_latlng(LatLng(38.0, -3.0), 5);
  std::vector<Observation> obs;
  for (CellId c = host.child_begin(8); c < host.child_end(8); c = c.next()) {
    Observation o;
    o.cell = c;
    o.value = c.center().z();
    obs.push_back(o);
  }
  Covering region{{host}, {}};
  double got =
      weighted_aggregate(obs, region, [](CellId c) { return c.area_sr(); });

  double num = 0, den = 0;
  for (CellId c = host.child_begin(11); c < host.child_end(11); c = c.next()) {
    num += c.center().z() * c.area_sr();
    den += c.area_sr();
  }
  CHECK(got == doctest::Approx(num / den).epsilon(0.01));
}
