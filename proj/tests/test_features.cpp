#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "tabsyn/features.hpp"

using namespace tabsyn;

TEST_CASE("ndvi hand cases", "[features]") {
    CHECK(ndvi({0.0, 0.3, 0.3}) == 0.0);
    CHECK_THAT(ndvi({0.0, 0.1, 0.5}), Catch::Matchers::WithinRel(0.4 / 0.6, 1e-12));
    CHECK(ndvi({0.0, 0.0, 0.7}) == 1.0);
    CHECK_THROWS_AS(ndvi({0.0, 0.0, 0.0}), ZeroDenominator);
}

TEST_CASE("ndvi stays in [-1,1] for non-negative bands", "[features][property]") {
    for (int i = 0; i < 1000; ++i) {
        const double red = (i % 37) * 0.027 + 0.001;
        const double nir = (i % 53) * 0.019 + 0.001;
        const double v = ndvi({0.0, red, nir});
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("evi hand cases", "[features]") {
    CHECK(evi({0.05, 0.3, 0.3}) == 0.0);
    // 2.5 * (0.5 - 0.1) / (0.5 + 0.6 - 0.375 + 1)
    CHECK_THAT(evi({0.05, 0.1, 0.5}), Catch::Matchers::WithinRel(1.0 / 1.725, 1e-12));
    const double blue = (0.5 + 6.0 * 0.1 + 1.0) / 7.5;  // forces a zero denominator
    CHECK_THROWS_AS(evi({blue, 0.1, 0.5}), ZeroDenominator);
}

TEST_CASE("evi numerator antisymmetry", "[features][property]") {
    // swapping nir and red negates the result once the denominator is held fixed
    const double nir = 0.42, red = 0.17, blue = 0.08;
    const double denom = nir + 6.0 * red - 7.5 * blue + 1.0;
    const double swapped_denom = red + 6.0 * nir - 7.5 * blue + 1.0;
    const double forward = evi({blue, red, nir}) * denom;
    const double backward = evi({blue, nir, red}) * swapped_denom;
    CHECK_THAT(forward, Catch::Matchers::WithinRel(-backward, 1e-12));
}

TEST_CASE("distance to a coincident vertex is zero", "[features]") {
    const Polyline line{{10.0, 20.0}, {10.0, 21.0}};
    CHECK(distance_to_nearest_line({10.0, 20.0}, {line}) == 0.0);
}

TEST_CASE("distance matches the spherical arc for a meridian offset", "[features]") {
    // 0.01 degrees due north of a long east-west segment on the equator
    const Polyline line{{0.0, -1.0}, {0.0, 1.0}};
    const double d = distance_to_nearest_line({0.01, 0.0}, {line});
    const double expected = 0.01 * (std::numbers::pi / 180.0) * kEarthRadiusMeters;
    CHECK_THAT(d, Catch::Matchers::WithinRel(expected, 1e-9));
}

TEST_CASE("distance takes the minimum over lines", "[features]") {
    const Polyline near{{0.1, -1.0}, {0.1, 1.0}};
    const Polyline far{{5.0, -1.0}, {5.0, 1.0}};
    const double d_near = distance_to_nearest_line({0.0, 0.0}, {near});
    const double d_both = distance_to_nearest_line({0.0, 0.0}, {near, far});
    CHECK(d_both == d_near);
}

TEST_CASE("distance invariant under reversal and subdivision", "[features][property]") {
    const Polyline line{{37.1, -122.3}, {37.4, -122.0}, {37.8, -121.7}};
    Polyline reversed(line.rbegin(), line.rend());
    Polyline subdivided;
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
        subdivided.push_back(line[i]);
        subdivided.push_back({(line[i].lat + line[i + 1].lat) / 2.0,
                              (line[i].lon + line[i + 1].lon) / 2.0});
    }
    subdivided.push_back(line.back());

    const GeoPoint probes[] = {{37.0, -122.5}, {37.5, -121.9}, {38.0, -122.0}, {37.45, -122.05}};
    for (const GeoPoint& p : probes) {
        const double base = distance_to_nearest_line(p, {line});
        CHECK_THAT(distance_to_nearest_line(p, {reversed}),
                   Catch::Matchers::WithinRel(base, 1e-6));
        CHECK_THAT(distance_to_nearest_line(p, {subdivided}),
                   Catch::Matchers::WithinRel(base, 1e-6));
    }
}

TEST_CASE("distance error paths", "[features]") {
    CHECK_THROWS_AS(distance_to_nearest_line({0.0, 0.0}, {}), NoLines);
    CHECK_THROWS_AS(distance_to_nearest_line({0.0, 0.0}, {Polyline{{1.0, 1.0}}}), Error);
    CHECK_THROWS_AS(distance_to_nearest_line({99.0, 0.0}, {Polyline{{0.0, 0.0}, {1.0, 1.0}}}),
                    Error);
}

TEST_CASE("polyline csv parsing", "[features]") {
    std::istringstream in(
        "line_id,vertex_order,lat,lon\n"
        "a,2,0.0,2.0\n"
        "a,1,0.0,1.0\n"
        "b,1,5.0,0.0\n"
        "b,2,6.0,0.0\n");
    const auto lines = parse_polylines_csv(in);
    REQUIRE(lines.size() == 2);
    CHECK(lines[0][0].lon == 1.0);  // sorted by vertex_order
    CHECK(lines[0][1].lon == 2.0);

    std::istringstream bad("line_id,vertex_order,lat,lon\na,1,x,0\n");
    CHECK_THROWS_AS(parse_polylines_csv(bad), BadCell);
}
