#include "epc/classic/search.hpp"

#include <cmath>

namespace epc::classic {

std::vector<double> default_svm_c_grid() {
    std::vector<double> grid;
    for (int e = -4; e <= 3; ++e) grid.push_back(std::pow(10.0, e));
    return grid;
}

std::vector<std::size_t> default_knn_k_grid() { return {1, 3, 5, 7, 9}; }

} // namespace epc::classic
