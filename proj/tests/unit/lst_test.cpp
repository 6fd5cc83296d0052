#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "epc/core/rng.hpp"
#include "epc/dataset/lst.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace epc;
using namespace epc::dataset;
using fixtures::uniform_grid;

namespace {

FootprintPolygon box(double x0, double y0, double x1, double y1) { return FootprintPolygon(fixtures::rectangle(x0, y0, x1, y1)); }

} // namespace

TEST(LstZonal, SingleSample) {
    const std::vector<LstObservation> obs{uniform_grid(1, 1, 0, 0, 30, 12.3, 4)};
    const auto v = lst_zonal_aggregate(obs, box(5, 5, 25, 25));
    ASSERT_TRUE(v);
    EXPECT_DOUBLE_EQ(*v, 12.3);
}

TEST(LstZonal, ThresholdExcludesWarmDate) {
    const std::vector<LstObservation> obs{uniform_grid(1, 1, 0, 0, 30, 10, 4), uniform_grid(1, 1, 0, 0, 30, 99, 6)};
    EXPECT_DOUBLE_EQ(*lst_zonal_aggregate(obs, box(5, 5, 25, 25)), 10.0);
}

TEST(LstZonal, ThresholdIsStrict) {
    const std::vector<LstObservation> at{uniform_grid(1, 1, 0, 0, 30, 10, 5.0)};
    EXPECT_FALSE(lst_zonal_aggregate(at, box(5, 5, 25, 25)).has_value());
    const std::vector<LstObservation> below{uniform_grid(1, 1, 0, 0, 30, 10, std::nextafter(5.0, 0.0))};
    EXPECT_TRUE(lst_zonal_aggregate(below, box(5, 5, 25, 25)).has_value());
}

TEST(LstZonal, NoColdObservationIsMissingNotError) {
    const std::vector<LstObservation> obs{uniform_grid(2, 2, 0, 0, 30, 10, 7), uniform_grid(2, 2, 0, 0, 30, 11, 9)};
    EXPECT_FALSE(lst_zonal_aggregate(obs, box(0, 0, 60, 60)).has_value());
    EXPECT_THROW(lst_zonal_aggregate(std::vector<LstObservation>{}, box(0, 0, 1, 1)), InvalidArgument);
}

// Footprint covering three pixel centres of a 3x1 row, over two cold dates.
TEST(LstZonal, ThreeCentresTwoDatesMeanOfSix) {
    auto a = uniform_grid(3, 1, 0, 0, 30, 0, 2, "d1");
    auto b = uniform_grid(3, 1, 0, 0, 30, 0, 3, "d2");
    a.grid.values = {1, 2, 3};
    b.grid.values = {10, 20, 30};
    const std::vector<LstObservation> obs{a, b};
    const auto fp = box(1, 1, 89, 29);
    const auto samples = lst_samples(obs, fp);
    EXPECT_EQ(samples.size(), 6u);
    EXPECT_DOUBLE_EQ(*lst_zonal_aggregate(obs, fp), (1 + 2 + 3 + 10 + 20 + 30) / 6.0);
    EXPECT_DOUBLE_EQ(*lst_zonal_aggregate(obs, fp, 5, LstReducer::Median), (3 + 10) / 2.0);
}

TEST(LstZonal, IdentityOnSinglePixel) {
    Rng rng(4);
    for (int i = 0; i < 50; ++i) {
        auto g = uniform_grid(4, 4, 0, 0, 30, 0, 1);
        for (auto& v : g.grid.values) v = rng.uniform(-10, 40);
        const int r = static_cast<int>(rng.uniform_index(4)), c = static_cast<int>(rng.uniform_index(4));
        const auto centre = g.grid.cell_center(r, c);
        const auto fp = box(centre.x - 3, centre.y - 3, centre.x + 3, centre.y + 3);
        EXPECT_EQ(*lst_zonal_aggregate(std::vector<LstObservation>{g}, fp), g.grid.at(r, c));
    }
}

TEST(LstZonal, TinyFootprintFallsBackToNearestCentre) {
    auto g = uniform_grid(2, 2, 0, 0, 30, 0, 1);
    g.grid.values = {1, 2, 3, 4};  // row 0 is north: (0,0)=1 at centre (15,45)
    // Small square near the north-west centre but not containing it.
    const auto fp = box(17, 40, 20, 43);
    EXPECT_DOUBLE_EQ(*lst_zonal_aggregate(std::vector<LstObservation>{g}, fp), 1.0);
    // Same footprint off the grid: no fallback.
    const auto off = box(70, 70, 73, 73);
    EXPECT_FALSE(lst_zonal_aggregate(std::vector<LstObservation>{g}, off).has_value());
}

TEST(LstZonal, NoDataPixelsAreSkipped) {
    auto g = uniform_grid(2, 1, 0, 0, 30, 0, 1);
    g.grid.values = {std::numeric_limits<double>::quiet_NaN(), 8};
    EXPECT_DOUBLE_EQ(*lst_zonal_aggregate(std::vector<LstObservation>{g}, box(1, 1, 59, 29)), 8.0);
    g.grid.values = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    EXPECT_FALSE(lst_zonal_aggregate(std::vector<LstObservation>{g}, box(1, 1, 59, 29)).has_value());
}

// Brute-force enumeration of every pixel of every date on random fixtures.
TEST(LstZonal, MatchesBruteForceOracle) {
    Rng rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<LstObservation> obs;
        const int dates = 1 + static_cast<int>(rng.uniform_index(4));
        const double cell = trial % 3 == 0 ? 30.0 : rng.uniform(5, 40);
        const int nc = 3 + static_cast<int>(rng.uniform_index(8)), nr = 3 + static_cast<int>(rng.uniform_index(8));
        for (int d = 0; d < dates; ++d) {
            auto o = uniform_grid(nc, nr, 1000, 2000, cell, 0, rng.uniform(-2, 9));
            for (auto& v : o.grid.values) v = rng.bernoulli(0.05) ? std::numeric_limits<double>::quiet_NaN() : rng.uniform(-5, 30);
            obs.push_back(std::move(o));
        }
        const double r_max = trial % 4 == 0 ? 0.3 * cell : rng.uniform(0.5, 3.0) * cell;
        const epc::dataset::Point2 centre{1000 + rng.uniform(0, nc * cell), 2000 + rng.uniform(0, nr * cell)};
        const auto ring = fixtures::star_polygon(rng, centre, 0.2 * r_max, r_max, 3 + static_cast<int>(rng.uniform_index(8)));
        const FootprintPolygon fp(ring);

        const auto expected = oracle::zonal_values(obs, ring, kDefaultGroundTempThreshold);
        const auto got = lst_zonal_aggregate(obs, fp);
        ASSERT_EQ(got.has_value(), !expected.empty()) << "trial " << trial;
        if (!got) continue;
        double mean = 0.0;
        for (const double v : expected) mean += v;
        mean /= static_cast<double>(expected.size());
        EXPECT_NEAR(*got, mean, 1e-9) << "trial " << trial;
    }
}

TEST(LstGrid, ParseAndFormatRoundTrip) {
    const std::string text =
        "NCOLS 2\nnrows 2\nxllcorner 100\nyllcorner 200\ncellsize 30\ntimestamp 2020-01-05\nground_temp 3.5\n"
        "1 2\nNaN 4\n";
    const auto o = parse_lst_grid(text);
    EXPECT_EQ(o.grid.ncols, 2);
    EXPECT_EQ(o.timestamp, "2020-01-05");
    EXPECT_DOUBLE_EQ(o.ground_temp, 3.5);
    EXPECT_TRUE(std::isnan(o.grid.at(1, 0)));
    EXPECT_DOUBLE_EQ(o.grid.at(1, 1), 4.0);
    const auto again = parse_lst_grid(format_lst_grid(o));
    EXPECT_EQ(again.grid.ncols, o.grid.ncols);
    EXPECT_EQ(again.grid.xll, o.grid.xll);
    EXPECT_EQ(again.grid.at(0, 1), o.grid.at(0, 1));
    EXPECT_TRUE(std::isnan(again.grid.at(1, 0)));
}

TEST(LstGrid, MalformedInputs) {
    EXPECT_THROW(parse_lst_grid("ncols 2\nnrows 1\n"), DataError);
    EXPECT_THROW(parse_lst_grid("ncols 2\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 30\ntimestamp t\nground_temp 1\n1\n"),
                 DataError);
    EXPECT_THROW(parse_lst_grid("ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 0\ntimestamp t\nground_temp 1\n1\n"),
                 DataError);
}
