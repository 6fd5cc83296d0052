#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "epc/core/rng.hpp"
#include "epc/dataset/geometry.hpp"
#include "epc/dataset/lst.hpp"

namespace fixtures {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("epc_test_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

// Star-shaped (hence simple) polygon around `centre`, counter-clockwise.
inline std::vector<epc::dataset::Point2> star_polygon(epc::Rng& rng, epc::dataset::Point2 centre, double r_min,
                                                      double r_max, int vertices) {
    std::vector<double> angles;
    for (int i = 0; i < vertices; ++i) angles.push_back((i + rng.uniform(0.1, 0.9)) * 2.0 * M_PI / vertices);
    std::vector<epc::dataset::Point2> ring;
    for (const double a : angles) {
        const double r = rng.uniform(r_min, r_max);
        ring.push_back({centre.x + r * std::cos(a), centre.y + r * std::sin(a)});
    }
    return ring;
}

inline std::vector<epc::dataset::Point2> rectangle(double x0, double y0, double x1, double y1) {
    return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

inline epc::dataset::LstObservation uniform_grid(int ncols, int nrows, double xll, double yll, double cellsize,
                                                 double value, double ground_temp, std::string ts = "t") {
    epc::dataset::LstObservation o;
    o.grid.ncols = ncols;
    o.grid.nrows = nrows;
    o.grid.xll = xll;
    o.grid.yll = yll;
    o.grid.cellsize = cellsize;
    o.grid.values.assign(static_cast<std::size_t>(ncols) * nrows, value);
    o.timestamp = std::move(ts);
    o.ground_temp = ground_temp;
    return o;
}

} // namespace fixtures
