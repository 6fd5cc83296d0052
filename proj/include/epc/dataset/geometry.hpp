#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "epc/core/error.hpp"

namespace epc::dataset {

// Planar projected coordinates in metres.
struct Point2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point2&, const Point2&) = default;
};

class GeometryError : public DataError {
public:
    using DataError::DataError;
};

struct BoundingBox {
    double min_x, min_y, max_x, max_y;
    bool contains(Point2 p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
};

// Simple polygon ring. The closing vertex is not repeated; if the input repeats
// it, the duplicate is dropped. Construction validates vertex count, simplicity
// and non-zero area.
class FootprintPolygon {
public:
    explicit FootprintPolygon(std::vector<Point2> ring);

    std::span<const Point2> ring() const { return ring_; }
    const BoundingBox& bounds() const { return bounds_; }

    // Even-odd rule. Points exactly on an edge may fall either way.
    bool contains(Point2 p) const;

    // Area-weighted centroid.
    Point2 centroid() const;

private:
    std::vector<Point2> ring_;
    BoundingBox bounds_{};
};

// Shoelace signed area; positive for counter-clockwise rings.
double signed_area(std::span<const Point2> ring);

// Absolute shoelace area. Throws GeometryError when the ring is degenerate.
double footprint_area(std::span<const Point2> ring);
double footprint_area(const FootprintPolygon& polygon);

struct Footprint {
    std::string id;
    FootprintPolygon polygon;
};

struct LocatedPoint {
    std::string id;
    Point2 location;
};

struct SpatialJoinResult {
    std::map<std::string, std::string> matched;  // point id -> footprint id
    std::vector<std::string> unmatched;          // point ids, input order
};

class AmbiguousJoinError : public DataError {
public:
    AmbiguousJoinError(std::string point_id, std::vector<std::string> candidates);
    const std::string& point_id() const { return point_id_; }
    const std::vector<std::string>& candidates() const { return candidates_; }

private:
    std::string point_id_;
    std::vector<std::string> candidates_;
};

// Maps each point to the unique footprint containing it. A point inside more
// than one footprint raises AmbiguousJoinError.
SpatialJoinResult spatial_join(std::span<const LocatedPoint> points, std::span<const Footprint> footprints);

} // namespace epc::dataset
