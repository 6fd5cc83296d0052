#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epc/dataset/geometry.hpp"

namespace epc::dataset {

// North-up raster. Row 0 is the northernmost row; (xll, yll) is the lower-left
// corner of the lower-left cell.
struct RasterGrid {
    int ncols = 0;
    int nrows = 0;
    double xll = 0.0;
    double yll = 0.0;
    double cellsize = 30.0;
    std::vector<double> values;  // row-major, NaN marks no-data

    double at(int row, int col) const { return values[static_cast<std::size_t>(row) * ncols + col]; }
    Point2 cell_center(int row, int col) const {
        return {xll + (col + 0.5) * cellsize, yll + (nrows - row - 0.5) * cellsize};
    }
    bool covers(Point2 p) const {
        return p.x >= xll && p.x <= xll + ncols * cellsize && p.y >= yll && p.y <= yll + nrows * cellsize;
    }
    void validate() const;
};

// One acquisition date.
struct LstObservation {
    RasterGrid grid;
    std::string timestamp;
    double ground_temp = 0.0;  // degrees C at acquisition
};

enum class LstReducer { Mean, Median };

inline constexpr double kDefaultGroundTempThreshold = 5.0;

struct LstSample {
    std::size_t observation;
    int row;
    int col;
    double value;
};

// Every finite (pixel, date) sample used for `footprint`: pixel centres inside
// the footprint on observations colder than `threshold`. When no centre of an
// observation's grid falls inside, that observation contributes the single
// pixel whose centre is nearest the footprint centroid, provided the centroid
// lies on the grid.
std::vector<LstSample> lst_samples(std::span<const LstObservation> observations, const FootprintPolygon& footprint,
                                   double threshold = kDefaultGroundTempThreshold);

// Building-level LST. Returns nullopt when no sample survives thresholding.
// Throws InvalidArgument on an empty observation list.
std::optional<double> lst_zonal_aggregate(std::span<const LstObservation> observations,
                                          const FootprintPolygon& footprint,
                                          double threshold = kDefaultGroundTempThreshold,
                                          LstReducer reducer = LstReducer::Mean);

// ASCII grid with header keys ncols, nrows, xllcorner, yllcorner, cellsize,
// timestamp, ground_temp (one "key value" per line, any order), then
// nrows*ncols whitespace-separated values. "NaN" marks no-data.
LstObservation read_lst_grid(const std::filesystem::path& path);
LstObservation parse_lst_grid(std::string_view text, std::string_view source = "<memory>");
std::string format_lst_grid(const LstObservation& observation);

} // namespace epc::dataset
