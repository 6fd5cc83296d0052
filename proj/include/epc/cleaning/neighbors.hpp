#pragma once

#include <span>
#include <vector>

#include "epc/core/matrix.hpp"

namespace epc::cleaning {

struct Neighbor {
    std::size_t index;
    double distance;  // Euclidean
    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Exact k nearest rows of `points` to `query`, ascending by distance with ties
// broken by lower row index.
std::vector<Neighbor> nearest_neighbors(std::span<const double> query, const Matrix& points, std::size_t k);

} // namespace epc::cleaning
