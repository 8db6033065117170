#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "tabsyn/errors.hpp"

namespace tabsyn {

// Reflectance samples from Landsat-8 band 2 (blue), band 4 (red) and
// band 5 (near infrared).
struct BandSample {
    double blue = 0.0;
    double red = 0.0;
    double nir = 0.0;
};

// NDVI = (NIR - Red) / (NIR + Red). In [-1, 1] for non-negative bands.
inline double ndvi(const BandSample& s) {
    const double denom = s.nir + s.red;
    if (denom == 0.0) throw ZeroDenominator("ndvi: NIR + Red is zero");
    return (s.nir - s.red) / denom;
}

// EVI = 2.5 (NIR - Red) / (NIR + 6 Red - 7.5 Blue + 1).
inline double evi(const BandSample& s) {
    const double denom = s.nir + 6.0 * s.red - 7.5 * s.blue + 1.0;
    if (denom == 0.0) throw ZeroDenominator("evi: denominator is zero");
    return 2.5 * (s.nir - s.red) / denom;
}

struct GeoPoint {
    double lat = 0.0;  // degrees, [-90, 90]
    double lon = 0.0;  // degrees, [-180, 180]
};

inline void validate_geo(const GeoPoint& p) {
    if (p.lat < -90.0 || p.lat > 90.0 || p.lon < -180.0 || p.lon > 180.0)
        throw Error("geo point out of range: lat=" + std::to_string(p.lat) +
                    " lon=" + std::to_string(p.lon));
}

using Polyline = std::vector<GeoPoint>;

inline constexpr double kEarthRadiusMeters = 6371000.0;

namespace detail {

// Point-to-segment distance using a local equirectangular projection centred
// on the query point: longitudes are scaled by cos(query latitude), then
// plain 2-D geometry applies. The projection is affine in (lat, lon), so
// splitting a segment cannot change the result. Adequate for sub-100-km
// scales.
inline double point_segment_distance_m(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) {
    constexpr double deg = std::numbers::pi / 180.0;
    const double k = std::cos(p.lat * deg);

    const double px = (p.lon - a.lon) * k * deg;
    const double py = (p.lat - a.lat) * deg;
    const double bx = (b.lon - a.lon) * k * deg;
    const double by = (b.lat - a.lat) * deg;

    const double len2 = bx * bx + by * by;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp((px * bx + py * by) / len2, 0.0, 1.0);
    const double dx = px - t * bx;
    const double dy = py - t * by;
    return std::sqrt(dx * dx + dy * dy) * kEarthRadiusMeters;
}

}  // namespace detail

// Minimum distance in meters from a point to any segment of any polyline.
inline double distance_to_nearest_line(const GeoPoint& p, const std::vector<Polyline>& lines) {
    if (lines.empty()) throw NoLines("distance_to_nearest_line: no polylines given");
    validate_geo(p);
    double best = std::numeric_limits<double>::infinity();
    for (const Polyline& line : lines) {
        if (line.size() < 2) throw Error("polyline needs at least 2 vertices");
        for (std::size_t i = 0; i + 1 < line.size(); ++i)
            best = std::min(best, detail::point_segment_distance_m(p, line[i], line[i + 1]));
    }
    return best;
}

// Reads polylines from a simple CSV: line_id,vertex_order,lat,lon with a
// header line. Vertices are sorted by vertex_order within each line_id.
inline std::vector<Polyline> parse_polylines_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw BadFile("polyline csv: missing header");
    std::map<std::string, std::vector<std::pair<long, GeoPoint>>> by_id;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        for (char c : line) {
            if (c == ',') {
                fields.push_back(field);
                field.clear();
            } else {
                field += c;
            }
        }
        fields.push_back(field);
        if (fields.size() != 4)
            throw RaggedRow("polyline csv line " + std::to_string(line_no) +
                            ": expected 4 fields");
        try {
            GeoPoint p{std::stod(fields[2]), std::stod(fields[3])};
            validate_geo(p);
            by_id[fields[0]].emplace_back(std::stol(fields[1]), p);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            throw BadCell("polyline csv line " + std::to_string(line_no) + ": bad numeric field");
        }
    }
    std::vector<Polyline> lines;
    for (auto& [id, verts] : by_id) {
        std::sort(verts.begin(), verts.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        Polyline pl;
        for (const auto& [order, pt] : verts) pl.push_back(pt);
        if (pl.size() < 2)
            throw Error("polyline '" + id + "' has fewer than 2 vertices");
        lines.push_back(std::move(pl));
    }
    return lines;
}

}  // namespace tabsyn
