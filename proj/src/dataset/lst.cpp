#include "epc/dataset/lst.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "epc/core/text.hpp"

namespace epc::dataset {

void RasterGrid::validate() const {
    if (ncols < 1 || nrows < 1) throw DataError("raster must be at least 1x1");
    if (!(cellsize > 0.0)) throw DataError("raster cell size must be positive");
    if (values.size() != static_cast<std::size_t>(ncols) * nrows) throw DataError("raster value count mismatch");
}

std::vector<LstSample> lst_samples(std::span<const LstObservation> observations, const FootprintPolygon& footprint,
                                   double threshold) {
    std::vector<LstSample> samples;
    const auto& box = footprint.bounds();
    const Point2 centroid = footprint.centroid();
    for (std::size_t o = 0; o < observations.size(); ++o) {
        const auto& obs = observations[o];
        if (!(obs.ground_temp < threshold)) continue;
        const auto& g = obs.grid;

        // Candidate columns/rows whose centres can fall inside the bounding box.
        const int c0 = std::max(0, static_cast<int>(std::floor((box.min_x - g.xll) / g.cellsize - 0.5)));
        const int c1 = std::min(g.ncols - 1, static_cast<int>(std::ceil((box.max_x - g.xll) / g.cellsize - 0.5)));
        const double top = g.yll + g.nrows * g.cellsize;
        const int r0 = std::max(0, static_cast<int>(std::floor((top - box.max_y) / g.cellsize - 0.5)));
        const int r1 = std::min(g.nrows - 1, static_cast<int>(std::ceil((top - box.min_y) / g.cellsize - 0.5)));

        bool any_inside = false;
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                if (!footprint.contains(g.cell_center(r, c))) continue;
                any_inside = true;
                if (const double v = g.at(r, c); std::isfinite(v)) samples.push_back({o, r, c, v});
            }
        }
        if (any_inside || !g.covers(centroid)) continue;

        // Tiny footprint: nearest pixel centre to the centroid, lowest (row, col) on ties.
        int best_r = 0, best_c = 0;
        double best = std::numeric_limits<double>::infinity();
        const int cc = std::clamp(static_cast<int>(std::floor((centroid.x - g.xll) / g.cellsize)), 0, g.ncols - 1);
        const int rc = std::clamp(static_cast<int>(std::floor((top - centroid.y) / g.cellsize)), 0, g.nrows - 1);
        for (int r = std::max(0, rc - 1); r <= std::min(g.nrows - 1, rc + 1); ++r) {
            for (int c = std::max(0, cc - 1); c <= std::min(g.ncols - 1, cc + 1); ++c) {
                const auto p = g.cell_center(r, c);
                const double d = (p.x - centroid.x) * (p.x - centroid.x) + (p.y - centroid.y) * (p.y - centroid.y);
                if (d < best) {
                    best = d;
                    best_r = r;
                    best_c = c;
                }
            }
        }
        if (const double v = g.at(best_r, best_c); std::isfinite(v)) samples.push_back({o, best_r, best_c, v});
    }
    return samples;
}

std::optional<double> lst_zonal_aggregate(std::span<const LstObservation> observations,
                                          const FootprintPolygon& footprint, double threshold, LstReducer reducer) {
    if (observations.empty()) throw InvalidArgument("lst_zonal_aggregate: no observations");
    const auto samples = lst_samples(observations, footprint, threshold);
    if (samples.empty()) return std::nullopt;

    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) values.push_back(s.value);

    if (reducer == LstReducer::Mean) {
        double sum = 0.0;
        for (const double v : values) sum += v;
        return sum / static_cast<double>(values.size());
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

LstObservation parse_lst_grid(std::string_view text, std::string_view source) {
    std::istringstream in{std::string(text)};
    std::map<std::string, std::string> header;
    static const char* kKeys[] = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "timestamp", "ground_temp"};
    std::string line;
    while (header.size() < std::size(kKeys) && std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty()) continue;
        const auto space = t.find_first_of(" \t");
        if (space == std::string_view::npos)
            throw DataError(std::string(source) + ": malformed grid header line '" + std::string(t) + "'");
        std::string key(t.substr(0, space));
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (std::find(std::begin(kKeys), std::end(kKeys), key) == std::end(kKeys))
            throw DataError(std::string(source) + ": unexpected grid header key '" + key + "'");
        header[key] = std::string(trim(t.substr(space)));
    }
    for (const char* key : kKeys)
        if (!header.count(key)) throw DataError(std::string(source) + ": missing grid header '" + key + "'");

    LstObservation obs;
    auto& g = obs.grid;
    g.ncols = static_cast<int>(parse_int(header["ncols"], "ncols"));
    g.nrows = static_cast<int>(parse_int(header["nrows"], "nrows"));
    g.xll = parse_double(header["xllcorner"], "xllcorner");
    g.yll = parse_double(header["yllcorner"], "yllcorner");
    g.cellsize = parse_double(header["cellsize"], "cellsize");
    obs.timestamp = header["timestamp"];
    obs.ground_temp = parse_double(header["ground_temp"], "ground_temp");
    if (g.ncols < 1 || g.nrows < 1) throw DataError(std::string(source) + ": grid must be at least 1x1");

    std::string token;
    g.values.reserve(static_cast<std::size_t>(g.ncols) * g.nrows);
    while (in >> token) g.values.push_back(parse_double(token, "grid value"));
    if (g.values.size() != static_cast<std::size_t>(g.ncols) * g.nrows)
        throw DataError(std::string(source) + ": expected " + std::to_string(g.ncols * g.nrows) +
                        " grid values, found " + std::to_string(g.values.size()));
    if (!std::isfinite(obs.ground_temp)) throw DataError(std::string(source) + ": ground_temp is not finite");
    g.validate();
    return obs;
}

LstObservation read_lst_grid(const std::filesystem::path& path) {
    return parse_lst_grid(read_text_file(path), path.string());
}

std::string format_lst_grid(const LstObservation& obs) {
    const auto& g = obs.grid;
    std::string out;
    out += "ncols " + std::to_string(g.ncols) + "\n";
    out += "nrows " + std::to_string(g.nrows) + "\n";
    out += "xllcorner " + format_exact(g.xll) + "\n";
    out += "yllcorner " + format_exact(g.yll) + "\n";
    out += "cellsize " + format_exact(g.cellsize) + "\n";
    out += "timestamp " + obs.timestamp + "\n";
    out += "ground_temp " + format_exact(obs.ground_temp) + "\n";
    for (int r = 0; r < g.nrows; ++r) {
        for (int c = 0; c < g.ncols; ++c) {
            if (c) out += ' ';
            out += format_exact(g.at(r, c));
        }
        out += '\n';
    }
    return out;
}

} // namespace epc::dataset
