#include "epc/cleaning/neighbors.hpp"

#include <algorithm>
#include <cmath>

namespace epc::cleaning {

std::vector<Neighbor> nearest_neighbors(std::span<const double> query, const Matrix& points, std::size_t k) {
    if (query.size() != points.cols())
        throw InvalidArgument("nearest_neighbors: query has dimension " + std::to_string(query.size()) +
                              ", points have " + std::to_string(points.cols()));
    if (k > points.rows()) throw InvalidArgument("nearest_neighbors: k exceeds the number of points");

    std::vector<std::pair<double, std::size_t>> scored(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) scored[i] = {squared_distance(query, points.row(i)), i};
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());

    std::vector<Neighbor> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back({scored[i].second, std::sqrt(scored[i].first)});
    return out;
}

} // namespace epc::cleaning
