#pragma once

// Coarse public-outline fixtures used across test suites. Coordinates are
// simplified boundaries in `lng lat` WKT order.

namespace geogrid::fixtures {

// Simplified Florida state boundary (~21 vertices, keys omitted).
inline constexpr const char* kFloridaWkt =
    "POLYGON((-87.45 30.98, -85.0 31.0, -84.86 30.71, -82.21 30.57, "
    "-81.45 30.72, -81.25 29.79, -80.52 28.46, -80.05 26.8, -80.13 25.83, "
    "-80.37 25.33, -81.1 25.13, -81.71 25.9, -82.06 26.55, -82.74 27.71, "
    "-82.84 28.9, -83.69 29.92, -84.38 30.06, -85.3 29.68, -85.85 30.21, "
    "-86.6 30.4, -87.3 30.33, -87.45 30.98))";

// Simplified contiguous-US boundary (~43 vertices).
inline constexpr const char* kConusWkt =
    "POLYGON((-124.73 48.39, -123.0 48.99, -95.15 49.0, -95.15 49.38, "
    "-94.62 48.74, -92.0 48.25, -89.5 48.0, -84.8 46.5, -82.4 45.0, "
    "-82.55 42.5, -78.9 42.9, -76.8 43.6, -74.7 45.0, -71.5 45.01, "
    "-69.23 47.46, -67.79 47.07, -66.95 44.81, -70.0 43.0, -69.96 41.5, "
    "-74.0 40.5, -75.5 35.2, -80.0 32.0, -80.05 26.8, -80.3 25.2, "
    "-81.8 25.2, -82.7 27.9, -84.0 30.0, -86.5 30.3, -89.1 30.2, "
    "-90.9 29.0, -93.8 29.7, -97.1 26.0, -99.1 26.4, -101.4 29.77, "
    "-104.9 30.6, -106.5 31.8, -108.2 31.33, -111.07 31.33, -114.8 32.5, "
    "-117.13 32.53, -120.6 34.56, -122.4 37.2, -124.4 40.44, -124.07 46.86, "
    "-124.73 48.39))";

// Contiguous-US extent envelope (lat/lng bounding quadrilateral). The
// level-2 covering of this extent is the published eight-cell shard set;
// the coastline polygon above touches only six of them (the other two are
// open Atlantic).
inline constexpr const char* kConusEnvelopeWkt =
    "POLYGON((-124.8 24.5, -66.9 24.5, -66.9 49.4, -124.8 49.4, "
    "-124.8 24.5))";

}  // namespace geogrid::fixtures
