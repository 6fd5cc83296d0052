#include "epc/dataset/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "epc/core/text.hpp"

namespace epc::dataset {

namespace {

double cross(Point2 o, Point2 a, Point2 b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

bool on_segment(Point2 p, Point2 a, Point2 b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

bool segments_intersect(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double d1 = cross(c, d, a);
    const double d2 = cross(c, d, b);
    const double d3 = cross(a, b, c);
    const double d4 = cross(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    if (d1 == 0 && on_segment(a, c, d)) return true;
    if (d2 == 0 && on_segment(b, c, d)) return true;
    if (d3 == 0 && on_segment(c, a, b)) return true;
    if (d4 == 0 && on_segment(d, a, b)) return true;
    return false;
}

} // namespace

double signed_area(std::span<const Point2> ring) {
    const std::size_t n = ring.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = ring[i];
        const auto& q = ring[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return 0.5 * twice;
}

double footprint_area(std::span<const Point2> ring) {
    if (ring.size() < 3) throw GeometryError("footprint needs at least 3 vertices");
    const double area = std::abs(signed_area(ring));
    if (!(area > 0.0)) throw GeometryError("degenerate footprint: zero area");
    return area;
}

double footprint_area(const FootprintPolygon& polygon) { return footprint_area(polygon.ring()); }

FootprintPolygon::FootprintPolygon(std::vector<Point2> ring) : ring_(std::move(ring)) {
    if (ring_.size() >= 2 && ring_.front() == ring_.back()) ring_.pop_back();
    if (ring_.size() < 3) throw GeometryError("footprint needs at least 3 distinct vertices");
    for (const auto& p : ring_)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("footprint vertex is not finite");

    const std::size_t n = ring_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent) {
                if (ring_[i] == ring_[j]) throw GeometryError("footprint repeats a vertex");
                continue;
            }
            if (segments_intersect(ring_[i], ring_[(i + 1) % n], ring_[j], ring_[(j + 1) % n]))
                throw GeometryError("footprint ring self-intersects");
        }
    }
    footprint_area(ring_);

    bounds_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : ring_) {
        bounds_.min_x = std::min(bounds_.min_x, p.x);
        bounds_.min_y = std::min(bounds_.min_y, p.y);
        bounds_.max_x = std::max(bounds_.max_x, p.x);
        bounds_.max_y = std::max(bounds_.max_y, p.y);
    }
}

bool FootprintPolygon::contains(Point2 p) const {
    if (!bounds_.contains(p)) return false;
    bool inside = false;
    const std::size_t n = ring_.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = ring_[i];
        const auto& b = ring_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

Point2 FootprintPolygon::centroid() const {
    // Shift to the first vertex to limit cancellation on large projected coordinates.
    const Point2 o = ring_.front();
    double twice_area = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = ring_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 p{ring_[i].x - o.x, ring_[i].y - o.y};
        const Point2 q{ring_[(i + 1) % n].x - o.x, ring_[(i + 1) % n].y - o.y};
        const double w = p.x * q.y - q.x * p.y;
        twice_area += w;
        cx += (p.x + q.x) * w;
        cy += (p.y + q.y) * w;
    }
    return {o.x + cx / (3.0 * twice_area), o.y + cy / (3.0 * twice_area)};
}

AmbiguousJoinError::AmbiguousJoinError(std::string point_id, std::vector<std::string> candidates)
    : DataError("point '" + point_id + "' lies inside several footprints: " + join(candidates, ", ")),
      point_id_(std::move(point_id)),
      candidates_(std::move(candidates)) {}

SpatialJoinResult spatial_join(std::span<const LocatedPoint> points, std::span<const Footprint> footprints) {
    SpatialJoinResult result;
    if (footprints.empty()) {
        for (const auto& p : points) result.unmatched.push_back(p.id);
        return result;
    }

    // Uniform grid over footprint bounding boxes, sized so each cell holds a few boxes.
    BoundingBox extent = footprints.front().polygon.bounds();
    double mean_span = 0.0;
    for (const auto& f : footprints) {
        const auto& b = f.polygon.bounds();
        extent.min_x = std::min(extent.min_x, b.min_x);
        extent.min_y = std::min(extent.min_y, b.min_y);
        extent.max_x = std::max(extent.max_x, b.max_x);
        extent.max_y = std::max(extent.max_y, b.max_y);
        mean_span += std::max(b.max_x - b.min_x, b.max_y - b.min_y);
    }
    mean_span /= static_cast<double>(footprints.size());
    const double cell = std::max(mean_span * 2.0, 1e-9);
    const auto cols = static_cast<long long>(std::floor((extent.max_x - extent.min_x) / cell)) + 1;
    const auto rows = static_cast<long long>(std::floor((extent.max_y - extent.min_y) / cell)) + 1;
    auto cell_of = [&](double x, double y) {
        const auto cx = std::clamp(static_cast<long long>(std::floor((x - extent.min_x) / cell)), 0LL, cols - 1);
        const auto cy = std::clamp(static_cast<long long>(std::floor((y - extent.min_y) / cell)), 0LL, rows - 1);
        return std::pair{cx, cy};
    };
    std::unordered_map<long long, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < footprints.size(); ++i) {
        const auto& b = footprints[i].polygon.bounds();
        const auto [x0, y0] = cell_of(b.min_x, b.min_y);
        const auto [x1, y1] = cell_of(b.max_x, b.max_y);
        for (auto cy = y0; cy <= y1; ++cy)
            for (auto cx = x0; cx <= x1; ++cx) buckets[cy * cols + cx].push_back(i);
    }

    for (const auto& point : points) {
        std::vector<std::size_t> hits;
        if (extent.contains(point.location)) {
            const auto [cx, cy] = cell_of(point.location.x, point.location.y);
            if (const auto it = buckets.find(cy * cols + cx); it != buckets.end())
                for (const auto i : it->second)
                    if (footprints[i].polygon.contains(point.location)) hits.push_back(i);
        }
        if (hits.empty()) {
            result.unmatched.push_back(point.id);
        } else if (hits.size() > 1) {
            std::vector<std::string> ids;
            for (const auto i : hits) ids.push_back(footprints[i].id);
            throw AmbiguousJoinError(point.id, std::move(ids));
        } else {
            result.matched[point.id] = footprints[hits.front()].id;
        }
    }
    return result;
}

} // namespace epc::dataset
