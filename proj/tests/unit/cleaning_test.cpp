#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <set>

#include "epc/cleaning/decisions.hpp"
#include "epc/cleaning/image_ops.hpp"
#include "epc/cleaning/kmeans.hpp"
#include "epc/cleaning/neighbors.hpp"
#include "epc/core/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace epc;
using namespace epc::cleaning;

namespace {

Matrix random_matrix(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
    Rng rng(seed);
    Matrix m(n, d);
    for (auto& v : m.values()) v = scale * rng.normal();
    return m;
}

Matrix column(std::initializer_list<double> xs) {
    Matrix m(0, 1);
    for (double x : xs) m.append_row(std::vector<double>{x});
    return m;
}

// Model with a fixed assignment, for decision tests.
ClusterModel fixed_model(std::size_t k, std::vector<std::size_t> assignments) {
    ClusterModel m;
    m.k = k;
    m.centroids = Matrix(k, 1);
    m.assignments = std::move(assignments);
    return m;
}

std::vector<std::string> make_ids(std::size_t n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
    return ids;
}

std::set<std::string> removed_set(const CleaningOutcome& o) {
    std::set<std::string> s;
    for (const auto& r : o.removed) s.insert(r.id);
    return s;
}

} // namespace

TEST(KMeans, SeparatedBlobs) {
    Rng rng(3);
    Matrix x(0, 2);
    std::vector<int> blob;
    for (int i = 0; i < 40; ++i) {
        const double c = i % 2 ? 100.0 : 0.0;
        x.append_row(std::vector<double>{c + rng.normal(), c + rng.normal()});
        blob.push_back(i % 2);
    }
    const auto m = kmeans(x, 2, 5);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j)
            EXPECT_EQ(m.assignments[i] == m.assignments[j], blob[i] == blob[j]);
}

TEST(KMeans, SingleClusterIsMean) {
    const auto x = random_matrix(30, 3, 8);
    const auto m = kmeans(x, 1, 1);
    for (std::size_t j = 0; j < 3; ++j) {
        double mean = 0.0;
        for (std::size_t r = 0; r < 30; ++r) mean += x(r, j);
        EXPECT_NEAR(m.centroids(0, j), mean / 30, 1e-12);
    }
}

TEST(KMeans, MatchesBruteForcePartition) {
    const std::vector<double> xs{0, 1, 2, 10, 11, 12};
    const auto x = column({0, 1, 2, 10, 11, 12});
    const double best = oracle::best_two_partition(xs);
    for (std::uint64_t seed = 0; seed < 10; ++seed) EXPECT_NEAR(kmeans(x, 2, seed).objective, best, 1e-12);
}

TEST(KMeans, ObjectiveNonIncreasingAndConsistent) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto x = random_matrix(120, 4, 100 + seed);
        const auto m = kmeans(x, 6, seed);
        ASSERT_FALSE(m.objective_history.empty());
        for (std::size_t i = 1; i < m.objective_history.size(); ++i)
            EXPECT_LE(m.objective_history[i], m.objective_history[i - 1] + 1e-9);
        for (const auto a : m.assignments) EXPECT_LT(a, 6u);
        EXPECT_NEAR(m.objective, kmeans_objective(x, m.centroids, m.assignments), 1e-9);
        EXPECT_DOUBLE_EQ(m.objective, m.objective_history.back());
    }
}

TEST(KMeans, Deterministic) {
    const auto x = random_matrix(80, 5, 2);
    const auto a = kmeans(x, 4, 9);
    const auto b = kmeans(x, 4, 9);
    EXPECT_EQ(a.assignments, b.assignments);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.objective_history, b.objective_history);
}

TEST(KMeans, StopsAtMaxIter) {
    const auto x = random_matrix(200, 3, 4);
    const auto m = kmeans(x, 10, 1, 1);
    EXPECT_EQ(m.iterations_run, 1u);
}

TEST(KMeans, EmptyClusterIsReseeded) {
    // Duplicate rows make it likely both initial centroids coincide, leaving one cluster empty.
    const auto x = column({0, 0, 0, 10});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto m = kmeans(x, 2, seed);
        EXPECT_DOUBLE_EQ(m.objective, 0.0) << seed;
        EXPECT_FALSE(m.members(0).empty());
        EXPECT_FALSE(m.members(1).empty());
    }
}

TEST(KMeans, Errors) {
    const auto x = random_matrix(3, 2, 1);
    EXPECT_THROW(kmeans(x, 4, 0), InvalidArgument);
    EXPECT_THROW(kmeans(x, 0, 0), InvalidArgument);
    auto bad = x;
    bad(1, 1) = std::nan("");
    EXPECT_THROW(kmeans(bad, 2, 0), InvalidArgument);
}

TEST(KMeans, SaveLoadRoundTrip) {
    fixtures::TempDir dir("kmeans");
    const auto x = random_matrix(25, 3, 6);
    const auto m = kmeans(x, 3, 2);
    const auto ids = make_ids(25);
    save_cluster_model(m, ids, dir / "model.json");
    std::vector<std::string> loaded_ids;
    const auto l = load_cluster_model(dir / "model.json", &loaded_ids);
    EXPECT_EQ(loaded_ids, ids);
    EXPECT_EQ(l.k, m.k);
    EXPECT_EQ(l.assignments, m.assignments);
    for (std::size_t i = 0; i < m.centroids.values().size(); ++i)
        EXPECT_FLOAT_EQ(static_cast<float>(l.centroids.values()[i]), static_cast<float>(m.centroids.values()[i]));
}

TEST(Neighbors, SelfMatch) {
    const auto x = random_matrix(20, 4, 11);
    const auto r = nearest_neighbors(x.row(7), x, 3);
    EXPECT_EQ(r[0], (Neighbor{7, 0.0}));
    for (std::size_t i = 0; i < 20; ++i) {
        const auto s = nearest_neighbors(x.row(i), x, 1);
        EXPECT_EQ(s[0].index, i);
        EXPECT_EQ(s[0].distance, 0.0);
    }
}

TEST(Neighbors, FullRankingIsSorted) {
    const auto x = random_matrix(15, 2, 12);
    const std::vector<double> q{0.1, -0.2};
    const auto r = nearest_neighbors(q, x, 15);
    ASSERT_EQ(r.size(), 15u);
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i < r.size(); ++i) {
        seen.insert(r[i].index);
        if (i) EXPECT_LE(r[i - 1].distance, r[i].distance);
    }
    EXPECT_EQ(seen.size(), 15u);
}

TEST(Neighbors, MatchesExhaustiveScan) {
    const auto x = random_matrix(50, 8, 13);
    Rng rng(14);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> q(8);
        for (auto& v : q) v = rng.normal();
        const auto r = nearest_neighbors(q, x, 10);
        const auto expected = oracle::knn_scan(q, x, 10);
        for (std::size_t i = 0; i < 10; ++i) {
            EXPECT_EQ(r[i].index, expected[i]);
            EXPECT_NEAR(r[i].distance, std::sqrt(squared_distance(q, x.row(expected[i]))), 1e-12);
        }
    }
}

TEST(Neighbors, TiesGoToLowerIndex) {
    const auto x = column({1, -1, 1, -1});
    const std::vector<double> q{0};
    const auto r = nearest_neighbors(q, x, 4);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(r[i].index, i);
}

TEST(Neighbors, Errors) {
    const auto x = random_matrix(5, 3, 1);
    EXPECT_THROW(nearest_neighbors(std::vector<double>{1, 2}, x, 1), InvalidArgument);
    EXPECT_THROW(nearest_neighbors(std::vector<double>{1, 2, 3}, x, 6), InvalidArgument);
}

TEST(Sentinel, AllProbesMatch) {
    const Image img(64, 64, kDefaultSentinelRgb);
    EXPECT_TRUE(detect_empty_aerial(img, SentinelSignature::corners(64, 64, kDefaultSentinelRgb)));
}

TEST(Sentinel, ZeroImageDoesNotMatch) {
    const Image img(64, 64);
    EXPECT_FALSE(detect_empty_aerial(img, SentinelSignature::corners(64, 64, kDefaultSentinelRgb)));
}

TEST(Sentinel, MinMatchesCounts) {
    Image img(8, 8);
    const auto sig4 = SentinelSignature::corners(8, 8, {1, 2, 3});
    for (int i = 0; i < 3; ++i) img.set(sig4.probes[i].x, sig4.probes[i].y, {1, 2, 3});
    EXPECT_FALSE(detect_empty_aerial(img, sig4));
    auto sig3 = sig4;
    sig3.min_matches = 3;
    EXPECT_TRUE(detect_empty_aerial(img, sig3));
}

TEST(Sentinel, Errors) {
    const Image img(16, 16);
    EXPECT_THROW(detect_empty_aerial(img, SentinelSignature::corners(32, 32, {0, 0, 0})), InvalidArgument);
    auto sig = SentinelSignature::corners(16, 16, {0, 0, 0});
    sig.min_matches = 0;
    EXPECT_THROW(detect_empty_aerial(img, sig), InvalidArgument);
    sig.min_matches = 5;
    EXPECT_THROW(detect_empty_aerial(img, sig), InvalidArgument);
}

TEST(Sentinel, UndecodableFileIsAnError) {
    fixtures::TempDir dir("sentinel");
    std::ofstream(dir / "tile.png") << "not an image";
    EXPECT_THROW(load_image(dir / "tile.png"), ImageDecodeError);
}

namespace {

Image noise_image(int w, int h, std::uint64_t seed) {
    Rng rng(seed);
    Image img(w, h);
    for (auto& b : img.bytes()) b = static_cast<std::uint8_t>(rng.uniform_index(200) + 20);
    return img;
}

PixelMask mask_of(int w, int h, bool value) { return {w, h, std::vector<bool>(static_cast<std::size_t>(w) * h, value)}; }

} // namespace

TEST(ApplyMask, FullMaskIsConstant) {
    const auto img = noise_image(10, 6, 1);
    EXPECT_EQ(apply_mask(img, mask_of(10, 6, true), {5, 6, 7}), Image(10, 6, {5, 6, 7}));
}

TEST(ApplyMask, EmptyMaskIsIdentity) {
    const auto img = noise_image(10, 6, 2);
    EXPECT_EQ(apply_mask(img, mask_of(10, 6, false), {5, 6, 7}), img);
}

TEST(ApplyMask, HalfMaskChangesHalfThePixels) {
    const int w = 12, h = 8;
    const auto img = noise_image(w, h, 3);  // values 20..219, never the fill
    auto mask = mask_of(w, h, false);
    for (int y = 0; y < h / 2; ++y)
        for (int x = 0; x < w; ++x) mask.values[static_cast<std::size_t>(y) * w + x] = true;
    const auto out = apply_mask(img, mask, {0, 0, 0});
    int changed = 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) changed += out.at(x, y) != img.at(x, y);
    EXPECT_EQ(changed, w * h / 2);
}

TEST(ApplyMask, Idempotent) {
    const auto img = noise_image(9, 9, 4);
    Rng rng(5);
    auto mask = mask_of(9, 9, false);
    for (std::size_t i = 0; i < mask.values.size(); ++i) mask.values[i] = rng.bernoulli(0.3);
    const auto once = apply_mask(img, mask, {1, 1, 1});
    EXPECT_EQ(apply_mask(once, mask, {1, 1, 1}), once);
}

TEST(ApplyMask, ShapeMismatch) {
    EXPECT_THROW(apply_mask(Image(4, 4), mask_of(4, 5, true), {0, 0, 0}), InvalidArgument);
}

TEST(Decisions, DropClusterWithKeepOverride) {
    std::vector<std::size_t> assign(15, 1);
    std::fill(assign.begin(), assign.begin() + 10, 0);
    const auto model = fixed_model(2, assign);
    const auto ids = make_ids(15);
    const auto out = apply_cleaning_decisions(ids, model, {{0, Verdict::Drop, {{"r3", Verdict::Keep}}}});
    EXPECT_EQ(out.removed.size(), 9u);
    EXPECT_EQ(out.kept.size(), 6u);
    EXPECT_FALSE(removed_set(out).count("r3"));
    for (const auto& r : out.removed) {
        EXPECT_EQ(r.cluster, 0u);
        EXPECT_FALSE(r.reason.empty());
    }
}

TEST(Decisions, NoDecisionsIsIdentity) {
    const auto model = fixed_model(3, {0, 1, 2, 1, 0});
    const auto ids = make_ids(5);
    const auto out = apply_cleaning_decisions(ids, model, {});
    EXPECT_EQ(out.kept, ids);
    EXPECT_TRUE(out.removed.empty());
}

TEST(Decisions, DropEverything) {
    const auto model = fixed_model(3, {0, 1, 2, 1, 0});
    const auto out = apply_cleaning_decisions(make_ids(5), model,
                                              {{0, Verdict::Drop, {}}, {1, Verdict::Drop, {}}, {2, Verdict::Drop, {}}});
    EXPECT_TRUE(out.kept.empty());
    EXPECT_EQ(out.removed.size(), 5u);
}

TEST(Decisions, RemovedSetIdentity) {
    // removed == (drop-cluster members plus drop overrides) minus keep overrides.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        const std::size_t k = 5, n = 60;
        std::vector<std::size_t> assign(n);
        for (auto& a : assign) a = rng.uniform_index(k);
        const auto model = fixed_model(k, assign);
        const auto ids = make_ids(n);

        std::vector<CleaningDecision> decisions;
        std::set<std::string> drops, keeps;
        for (std::size_t c = 0; c < k; ++c) {
            if (rng.bernoulli(0.2)) continue;
            CleaningDecision d{c, rng.bernoulli(0.5) ? Verdict::Drop : Verdict::Keep, {}};
            for (std::size_t i = 0; i < n; ++i) {
                if (assign[i] != c) continue;
                if (d.verdict == Verdict::Drop) drops.insert(ids[i]);
                if (rng.bernoulli(0.2)) {
                    const auto v = rng.bernoulli(0.5) ? Verdict::Drop : Verdict::Keep;
                    d.overrides.push_back({ids[i], v});
                    (v == Verdict::Drop ? drops : keeps).insert(ids[i]);
                }
            }
            decisions.push_back(d);
        }
        std::set<std::string> expected;
        for (const auto& id : drops)
            if (!keeps.count(id)) expected.insert(id);
        const auto out = apply_cleaning_decisions(ids, model, decisions);
        EXPECT_EQ(removed_set(out), expected);
        EXPECT_EQ(out.kept.size() + out.removed.size(), n);
    }
}

TEST(Decisions, Errors) {
    const auto model = fixed_model(2, {0, 1, 0});
    const auto ids = make_ids(3);
    EXPECT_THROW(apply_cleaning_decisions(ids, model, {{2, Verdict::Drop, {}}}), InvalidArgument);
    EXPECT_THROW(apply_cleaning_decisions(ids, model, {{0, Verdict::Drop, {{"r1", Verdict::Keep}}}}), InvalidArgument);
    EXPECT_THROW(apply_cleaning_decisions(ids, model, {{0, Verdict::Drop, {}}, {0, Verdict::Keep, {}}}),
                 InvalidArgument);
}

TEST(Decisions, FileRoundTrip) {
    fixtures::TempDir dir("decisions");
    const std::vector<CleaningDecision> d{{0, Verdict::Drop, {{"a", Verdict::Keep}, {"b", Verdict::Drop}}},
                                          {3, Verdict::Keep, {}}};
    {
        std::ofstream f(dir / "d.csv");
        f << format_decisions(d);
    }
    const auto back = read_decisions(dir / "d.csv");
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(format_decisions(back), format_decisions(d));
    EXPECT_EQ(back[0].overrides.size(), 2u);
    EXPECT_EQ(back[1].cluster_id, 3u);
}

TEST(Decisions, TemplateHasOneLinePerCluster) {
    const auto t = decisions_template(fixed_model(4, {0, 1, 2, 3}));
    EXPECT_EQ(std::count(t.begin(), t.end(), '\n'), 5);  // header plus four clusters
}

namespace {

// Cluster 0 holds n points at distances 1..n from its centroid at the origin.
struct MontageFixture {
    ClusterModel model;
    Matrix points;
    std::vector<std::optional<std::filesystem::path>> paths;
};

MontageFixture montage_fixture(const fixtures::TempDir& dir, std::size_t n) {
    MontageFixture f;
    f.model = fixed_model(1, std::vector<std::size_t>(n, 0));
    f.points = Matrix(0, 1);
    // Stored farthest first so ranking must reorder.
    for (std::size_t i = 0; i < n; ++i) {
        f.points.append_row(std::vector<double>{static_cast<double>(n - i)});
        const auto p = dir / ("img" + std::to_string(i) + ".png");
        save_png(Image(4, 4, {static_cast<std::uint8_t>(10 * i), 0, 0}), p);
        f.paths.push_back(p);
    }
    return f;
}

} // namespace

TEST(Montage, ExactFit) {
    fixtures::TempDir dir("montage4");
    const auto f = montage_fixture(dir, 4);
    const auto m = export_cluster_montage(f.model, f.points, f.paths, 0, {2, 2, 8});
    EXPECT_EQ(m.tiles, (std::vector<std::size_t>{3, 2, 1, 0}));
    EXPECT_EQ(m.image.width(), 16);
    EXPECT_EQ(m.image.height(), 16);
    EXPECT_TRUE(m.missing.empty());
    EXPECT_EQ(m.image.at(0, 0), (Rgb{30, 0, 0}));
    EXPECT_EQ(m.image.at(8, 8), (Rgb{0, 0, 0}));
}

TEST(Montage, SingleMemberIsPadded) {
    fixtures::TempDir dir("montage1");
    const auto f = montage_fixture(dir, 1);
    MontageOptions opt{2, 2, 8};
    const auto m = export_cluster_montage(f.model, f.points, f.paths, 0, opt);
    EXPECT_EQ(m.tiles.size(), 1u);
    EXPECT_EQ(m.image.at(12, 12), opt.background);
    EXPECT_EQ(m.image.at(12, 0), opt.background);
}

TEST(Montage, KeepsNearestToCentroid) {
    fixtures::TempDir dir("montage9");
    Rng rng(21);
    ClusterModel model = fixed_model(1, std::vector<std::size_t>(9, 0));
    model.centroids = Matrix(1, 2, std::vector<double>{0.5, -0.5});
    auto points = random_matrix(9, 2, 22);
    std::vector<std::optional<std::filesystem::path>> paths(9);
    const auto m = export_cluster_montage(model, points, paths, 0, {2, 2, 4});
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < 9; ++i) ranked.push_back({squared_distance(points.row(i), model.centroids.row(0)), i});
    std::sort(ranked.begin(), ranked.end());
    ASSERT_EQ(m.tiles.size(), 4u);
    for (std::size_t t = 0; t < 4; ++t) EXPECT_EQ(m.tiles[t], ranked[t].second);
}

TEST(Montage, MissingImagesAreListed) {
    fixtures::TempDir dir("montagemiss");
    auto f = montage_fixture(dir, 3);
    f.paths[1] = dir / "absent.png";
    f.paths[2].reset();
    MontageOptions opt{2, 2, 4};
    const auto m = export_cluster_montage(f.model, f.points, f.paths, 0, opt);
    EXPECT_EQ(m.tiles.size(), 3u);
    EXPECT_EQ(m.missing.size(), 2u);
    // Row 1 sits in tile slot 1 (top-right).
    EXPECT_EQ(m.image.at(4, 0), opt.missing_fill);
}

TEST(Montage, EmptyClusterIsAnError) {
    fixtures::TempDir dir("montage_empty");
    const auto f = montage_fixture(dir, 2);
    auto model = f.model;
    model.k = 2;
    model.centroids = Matrix(2, 1);
    EXPECT_THROW(export_cluster_montage(model, f.points, f.paths, 1), InvalidArgument);
}

TEST(Montage, Deterministic) {
    fixtures::TempDir dir("montage_det");
    const auto f = montage_fixture(dir, 5);
    EXPECT_EQ(export_cluster_montage(f.model, f.points, f.paths, 0).image,
              export_cluster_montage(f.model, f.points, f.paths, 0).image);
}
