// Acceptance checks 1-11. One PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "epc/attribution/integrated_gradients.hpp"
#include "epc/classic/classifiers.hpp"
#include "epc/cleaning/kmeans.hpp"
#include "epc/cleaning/neighbors.hpp"
#include "epc/cli/commands.hpp"
#include "epc/core/rng.hpp"
#include "epc/core/text.hpp"
#include "epc/dataset/lst.hpp"
#include "epc/dataset/split.hpp"
#include "epc/eval/ablation.hpp"
#include "epc/eval/metrics.hpp"
#include "epc/eval/synth.hpp"
#include "epc/fusion/head.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace epc;
using dataset::BinaryClass;
using FC = dataset::FeatureChannel;
using fusion::HeadKind;
using fusion::HeadParameters;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits) { return format_fixed(v, digits); }

std::vector<double> normal_vector(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.normal();
    return v;
}

HeadParameters random_head(HeadKind kind, std::size_t dim, Rng& rng) {
    auto p = HeadParameters::initialize(kind, dim, rng);
    for (std::size_t l = 0; l < p.num_layers(); ++l)
        for (auto& b : p.mutable_bias(l)) b = 0.5 * rng.normal();
    return p;
}

// 1
Outcome metric_oracle() {
    const auto t0 = Clock::now();
    int cases = 0, mismatches = 0;
    for (std::uint64_t a = 0; a <= 5; ++a)
        for (std::uint64_t b = 0; b <= 5; ++b)
            for (std::uint64_t c = 0; c <= 5; ++c)
                for (std::uint64_t d = 0; d <= 5; ++d) {
                    ++cases;
                    const std::int64_t counts[2][2] = {{std::int64_t(a), std::int64_t(b)},
                                                       {std::int64_t(c), std::int64_t(d)}};
                    const auto want = oracle::macro_rational(counts);
                    eval::ConfusionMatrix cm;
                    cm.counts = {{{a, b}, {c, d}}};
                    const auto got = eval::macro_metrics(cm);
                    bool ok = std::abs(got.precision_macro - want.precision.to_double()) <= 1e-12 &&
                              std::abs(got.recall_macro - want.recall.to_double()) <= 1e-12 &&
                              std::abs(got.f1_macro - want.f1.to_double()) <= 1e-12;
                    for (int k = 0; k < 2; ++k) {
                        const auto& g = got.per_class[k];
                        const auto& w = want.per_class[k];
                        ok = ok && std::abs(g.precision - w.precision.to_double()) <= 1e-12 &&
                             std::abs(g.recall - w.recall.to_double()) <= 1e-12 &&
                             std::abs(g.f1 - w.f1.to_double()) <= 1e-12 &&
                             g.precision_undefined == w.precision_undefined && g.recall_undefined == w.recall_undefined;
                    }
                    mismatches += !ok;
                }
    const double secs = seconds_since(t0);
    return {cases == 1296 && mismatches == 0 && secs < 5.0,
            std::to_string(cases) + " matrices, " + std::to_string(mismatches) + " mismatches, " + fmt(secs, 3) + " s"};
}

// 2
Outcome published_deltas() {
    const auto mm = eval::MetricReport::from_macro_percent(40.55, 50.00, 44.78);
    const auto knn = eval::MetricReport::from_macro_percent(50.56, 50.60, 50.51);
    const auto svm = eval::MetricReport::from_macro_percent(52.97, 53.87, 52.62);
    const auto mlp = eval::MetricReport::from_macro_percent(68.30, 63.05, 64.64);
    const auto a = format_fixed(eval::delta_to_majority(knn, mm), 2);
    const auto b = format_fixed(eval::delta_to_majority(svm, mm), 2);
    const auto c = format_fixed(eval::delta_to_majority(mlp, mm), 2);
    return {a == "5.73" && b == "7.84" && c == "19.86", "kNN +" + a + ", SVM +" + b + ", MLP +" + c};
}

// 3
Outcome majority_identity() {
    int sets = 0, bad = 0;
    Rng rng(303);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n_train = 2 + rng.uniform_index(300), n_test = 2 + rng.uniform_index(300);
        const double share = rng.uniform(0.05, 0.95);
        std::vector<BinaryClass> train, test;
        for (std::size_t i = 0; i < n_train; ++i) train.push_back(rng.bernoulli(share) ? BinaryClass::Inefficient : BinaryClass::Efficient);
        for (std::size_t i = 0; i < n_test; ++i) test.push_back(rng.bernoulli(share) ? BinaryClass::Inefficient : BinaryClass::Efficient);
        test[0] = BinaryClass::Efficient;
        test[1] = BinaryClass::Inefficient;
        const auto model = classic::fit_majority(train);
        const auto pred = model.predict(Matrix(n_test, 0));
        const auto r = eval::macro_metrics(eval::confusion(test, pred));
        ++sets;
        bad += r.recall_macro != 0.5 || format_fixed(100 * r.recall_macro, 2) != "50.00";
    }
    // majority model fitted on a synthetic train split, scored on its holdout test split
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        eval::SynthConfig sc;
        sc.geographies = {{"Cambridge", 400}, {"Peterborough", 100}};
        sc.embedding_dim = 4;
        sc.seed = seed;
        const auto data = eval::synth_generate(sc);
        dataset::SplitSpec sp;
        sp.fractions = {0.8, 0.2, 0.0};
        sp.holdout_geography = "Peterborough";
        sp.seed = seed;
        const auto r = eval::majority_report(data, dataset::split_dataset(data, sp));
        if (r.matrix.counts[0][0] + r.matrix.counts[0][1] == 0 || r.matrix.counts[1][0] + r.matrix.counts[1][1] == 0)
            continue;
        ++sets;
        bad += r.recall_macro != 0.5;
    }
    return {bad == 0, std::to_string(sets) + " test sets, " + std::to_string(bad) + " with macro recall != 50.00%"};
}

// 4
Outcome gradient_check() {
    const auto t0 = Clock::now();
    Rng rng(404);
    std::map<HeadKind, int> done;
    double worst = 0.0;
    int redrawn = 0;
    while (done[HeadKind::Linear] < 100 || done[HeadKind::Mlp] < 100) {
        const auto kind = done[HeadKind::Linear] < 100 ? HeadKind::Linear : HeadKind::Mlp;
        const std::size_t dim = 1 + rng.uniform_index(16);
        auto p = random_head(kind, dim, rng);
        const auto x = normal_vector(rng, dim);
        const auto label = rng.bernoulli(0.5) ? BinaryClass::Inefficient : BinaryClass::Efficient;
        const std::array<double, 2> w{rng.uniform(0.5, 2), rng.uniform(0.5, 2)};
        std::vector<double> scale(fusion::kHiddenWidth);
        for (auto& s : scale) s = rng.bernoulli(0.5) ? 2.0 : 0.0;

        fusion::ForwardCache cache;
        fusion::Logits logits;
        if (kind == HeadKind::Mlp) {
            logits = fusion::forward_with_scale(p, x, scale, cache);
            // relu has no derivative at 0; finite differences straddling it are meaningless
            bool near_kink = false;
            for (double h : cache.hidden_pre) near_kink |= std::abs(h) < 1e-3;
            if (near_kink) {
                ++redrawn;
                continue;
            }
        } else {
            logits = fusion::forward(p, x, fusion::Mode::Eval, 0.0, nullptr, cache);
        }
        const auto lg = fusion::weighted_cross_entropy(logits, label, w);
        std::vector<double> grads(p.size(), 0.0), input_grad(dim, 0.0);
        fusion::backward(p, cache, lg.grad, grads, input_grad);

        auto loss_at = [&](std::span<const double> values, std::span<const double> input) {
            HeadParameters q(kind, dim);
            std::copy(values.begin(), values.end(), q.mutable_values().begin());
            fusion::ForwardCache c;
            const auto l = kind == HeadKind::Mlp ? fusion::forward_with_scale(q, input, scale, c) : fusion::forward_eval(q, input);
            return fusion::weighted_cross_entropy(l, label, w).loss;
        };
        const std::vector<double> values(p.values().begin(), p.values().end());
        const auto num_p = oracle::numeric_gradient([&](std::span<const double> v) { return loss_at(v, x); }, values, 1e-5);
        const auto num_x = oracle::numeric_gradient([&](std::span<const double> v) { return loss_at(values, v); }, x, 1e-5);
        worst = std::max({worst, oracle::max_relative_error(grads, num_p), oracle::max_relative_error(input_grad, num_x)});
        ++done[kind];
    }
    const double secs = seconds_since(t0);
    std::ostringstream s;
    s << "100 linear + 100 mlp, max relative error " << worst << " (" << redrawn
      << " mlp draws near a relu kink redrawn), " << fmt(secs, 2) << " s";
    return {worst <= 1e-4 && secs < 30.0, s.str()};
}

// 5
Outcome integrated_gradients_check() {
    Rng rng(505);
    double linear_worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t dim = 1 + rng.uniform_index(64);
        const auto p = random_head(HeadKind::Linear, dim, rng);
        const auto x = normal_vector(rng, dim), b = normal_vector(rng, dim);
        for (std::size_t m : {1u, 2u, 3u, 10u, 50u, 500u})
            linear_worst = std::max(linear_worst, attribution::integrated_gradients(p, x, b, m).completeness_gap);
    }
    int over = 0, shrink = 0;
    double worst_ratio = 0.0;
    for (int t = 0; t < 100; ++t) {
        const auto p = random_head(HeadKind::Mlp, 12, rng);
        const auto x = normal_vector(rng, 12), b = normal_vector(rng, 12);
        const auto r50 = attribution::integrated_gradients(p, x, b, 50);
        const auto r500 = attribution::integrated_gradients(p, x, b, 500);
        const double ratio = r50.completeness_gap / std::abs(r50.target_delta);
        worst_ratio = std::max(worst_ratio, ratio);
        over += !(ratio <= 0.02);
        shrink += r500.completeness_gap <= r50.completeness_gap;
    }
    const bool pass = linear_worst <= 1e-12 && over == 0 && shrink >= 95;
    std::ostringstream s;
    s << "linear max gap " << linear_worst << "; mlp m=50 gap > 2% of |dF| in " << over
      << "/100 trials (worst " << fmt(100 * worst_ratio, 1) << "%); m=500 <= m=50 in " << shrink << "/100";
    return {pass, s.str()};
}

// 6
Outcome zonal_oracle() {
    Rng rng(606);
    int trials = 0, bad = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<dataset::LstObservation> obs;
        const int dates = 1 + static_cast<int>(rng.uniform_index(4));
        const double cell = trial % 3 == 0 ? 30.0 : rng.uniform(5, 40);
        const int nc = 3 + static_cast<int>(rng.uniform_index(8)), nr = 3 + static_cast<int>(rng.uniform_index(8));
        for (int d = 0; d < dates; ++d) {
            // ground temperatures include values exactly at the threshold
            const double gt = rng.bernoulli(0.2) ? 5.0 : rng.uniform(-2, 9);
            auto o = fixtures::uniform_grid(nc, nr, 1000, 2000, cell, 0, gt);
            for (auto& v : o.grid.values) v = rng.bernoulli(0.05) ? std::nan("") : rng.uniform(-5, 30);
            obs.push_back(std::move(o));
        }
        const double r_max = trial % 4 == 0 ? 0.3 * cell : rng.uniform(0.5, 3.0) * cell;
        const dataset::Point2 centre{1000 + rng.uniform(0, nc * cell), 2000 + rng.uniform(0, nr * cell)};
        const auto ring = fixtures::star_polygon(rng, centre, 0.2 * r_max, r_max, 3 + static_cast<int>(rng.uniform_index(8)));
        const dataset::FootprintPolygon fp(ring);
        const auto want = oracle::zonal_values(obs, ring, dataset::kDefaultGroundTempThreshold);
        const auto got = dataset::lst_zonal_aggregate(obs, fp);
        ++trials;
        if (got.has_value() != !want.empty()) {
            ++bad;
            continue;
        }
        if (!got) continue;
        const double mean = std::accumulate(want.begin(), want.end(), 0.0) / static_cast<double>(want.size());
        worst = std::max(worst, std::abs(*got - mean));
        bad += std::abs(*got - mean) > 1e-9;
    }
    const std::vector<dataset::LstObservation> at{fixtures::uniform_grid(1, 1, 0, 0, 30, 10, 5.0)};
    const std::vector<dataset::LstObservation> below{fixtures::uniform_grid(1, 1, 0, 0, 30, 10, std::nextafter(5.0, 0.0))};
    const dataset::FootprintPolygon box(fixtures::rectangle(5, 5, 25, 25));
    const bool strict = !dataset::lst_zonal_aggregate(at, box).has_value() &&
                        dataset::lst_zonal_aggregate(below, box).value_or(0.0) == 10.0;
    std::ostringstream s;
    s << trials << " fixtures, " << bad << " mismatches, max abs error " << worst
      << (strict ? ", 5 C excluded and 5 C - ulp included" : ", threshold not strict");
    return {bad == 0 && strict, s.str()};
}

// 7
Outcome kmeans_knn_oracles() {
    int increases = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(700 + seed);
        const std::size_t n = 40 + rng.uniform_index(160), d = 1 + rng.uniform_index(8), k = 2 + rng.uniform_index(8);
        Matrix x(n, d);
        for (auto& v : x.values()) v = rng.normal();
        const auto m = cleaning::kmeans(x, k, seed);
        for (std::size_t i = 1; i < m.objective_history.size(); ++i)
            increases += m.objective_history[i] > m.objective_history[i - 1] * (1 + 1e-12);
    }
    const std::vector<double> xs{0, 1, 2, 10, 11, 12};
    Matrix six(0, 1);
    for (double v : xs) six.append_row(std::vector<double>{v});
    const double best = oracle::best_two_partition(xs);
    bool fixture_ok = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed)
        fixture_ok = fixture_ok && std::abs(cleaning::kmeans(six, 2, seed).objective - best) <= 1e-12;

    Rng rng(777);
    Matrix x(200, 5);
    std::vector<BinaryClass> y;
    for (auto& v : x.values()) v = rng.normal();
    for (std::size_t i = 0; i < 200; ++i) y.push_back(rng.bernoulli(0.35) ? BinaryClass::Inefficient : BinaryClass::Efficient);
    const auto model = classic::fit_knn(x, y, 5);
    int knn_bad = 0;
    for (int t = 0; t < 100; ++t) {
        const auto q = normal_vector(rng, 5);
        const auto scan = oracle::knn_scan(q, x, 5);
        int votes = 0;
        for (auto i : scan) votes += y[i] == BinaryClass::Inefficient;
        const auto nn = cleaning::nearest_neighbors(q, x, 5);
        bool same = nn.size() == scan.size();
        for (std::size_t i = 0; same && i < nn.size(); ++i) same = nn[i].index == scan[i];
        knn_bad += !same || model.predict(q) != (votes >= 3 ? BinaryClass::Inefficient : BinaryClass::Efficient);
    }
    std::ostringstream s;
    s << "50 runs, " << increases << " objective increases; 6-point fixture "
      << (fixture_ok ? "optimal" : "suboptimal") << " (" << best << "); " << knn_bad << "/100 k-NN mismatches";
    return {increases == 0 && fixture_ok && knn_bad == 0, s.str()};
}

// 8
Outcome fusion_ordering() {
    const auto t0 = Clock::now();
    eval::SynthConfig sc;
    sc.geographies = {{"Cambridge", 4000}, {"Peterborough", 1000}};
    sc.embedding_dim = 64;
    sc.signal = {{FC::SV, 1.8}, {FC::AV, 1.8}, {FC::LST, 1.8}, {FC::FP, 1.8}, {FC::SegSV, 0.0}, {FC::EC, 0.0}};
    sc.seed = 808;
    const auto data = eval::synth_generate(sc);
    dataset::SplitSpec sp;
    sp.fractions = {0.8, 0.1, 0.1};
    sp.holdout_geography = "Peterborough";
    sp.seed = 808;
    const auto split = dataset::split_dataset(data, sp);

    const std::vector<FC> remote{FC::SV, FC::AV, FC::LST, FC::FP};
    const std::vector<FC> everything{FC::SV, FC::AV, FC::SegSV, FC::LST, FC::FP, FC::EC};
    eval::AblationSpec spec;
    spec.feature_subsets = {{FC::SV}, {FC::AV}, {FC::SegSV}, {FC::LST}, {FC::FP}, {FC::EC}, remote, everything};
    spec.head_kinds = {HeadKind::Linear, HeadKind::Mlp};
    spec.train.epochs = 50;
    spec.seed = 808;
    const auto result = eval::run_ablation(data, split, spec);

    double best_single = 0.0;
    std::string best_single_name;
    std::map<std::size_t, double> fused;  // subset size -> mlp F1
    for (const auto& row : result.rows) {
        if (row.subset.size() == 1) {
            if (row.report.f1_macro > best_single) {
                best_single = row.report.f1_macro;
                best_single_name = std::string(fusion::head_name(row.head)) + " " + dataset::channel_set_label(row.subset);
            }
        } else if (row.head == HeadKind::Mlp) {
            fused[row.subset.size()] = row.report.f1_macro;
        }
    }
    const double secs = seconds_since(t0);
    bool pass = secs < 120.0;
    for (const auto& [n, f1] : fused) pass = pass && f1 >= 0.90 && f1 - best_single >= 0.05;
    std::ostringstream s;
    s << "mlp SV+AV+LST+FP " << fmt(100 * fused[4], 2) << "%, mlp all six " << fmt(100 * fused[6], 2)
      << "%, best single-channel " << best_single_name << " " << fmt(100 * best_single, 2) << "%, " << fmt(secs, 1) << " s";
    return {pass, s.str()};
}

// 9
Outcome split_fidelity() {
    const std::vector<std::pair<std::string, std::size_t>> cities{
        {"Coventry", 21607}, {"Westminster", 6834}, {"Oxford", 7464}, {"Peterborough", 3700}};
    std::vector<std::string> geos;
    for (const auto& [g, n] : cities) geos.insert(geos.end(), n, g);
    Rng rng(909);
    rng.shuffle(std::span<std::string>(geos));
    std::vector<dataset::BuildingRecord> records;
    std::map<std::string, std::string> geo_of;
    for (std::size_t i = 0; i < geos.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof id, "m%05zu", i);
        records.push_back(dataset::make_record(id, geos[i], {0, 0}, {dataset::Grade::C}));
        geo_of[id] = geos[i];
    }
    dataset::SplitSpec spec;
    spec.counts = std::array<std::size_t, 3>{32315, 3590, 3700};
    spec.holdout_geography = "Peterborough";
    spec.seed = 909;
    const auto s = dataset::split_dataset(records, spec);
    const double n = static_cast<double>(s.size());
    const auto a = format_fixed(100.0 * s.train.size() / n, 2);
    const auto b = format_fixed(100.0 * s.validation.size() / n, 2);
    const auto c = format_fixed(100.0 * s.test.size() / n, 2);
    bool holdout_only = true;
    for (const auto& id : s.test) holdout_only = holdout_only && geo_of.at(id) == "Peterborough";
    for (const auto* part : {&s.train, &s.validation})
        for (const auto& id : *part) holdout_only = holdout_only && geo_of.at(id) != "Peterborough";
    std::set<std::string> all(s.train.begin(), s.train.end());
    all.insert(s.validation.begin(), s.validation.end());
    all.insert(s.test.begin(), s.test.end());
    const bool pass = a == "81.59" && b == "9.06" && c == "9.34" && holdout_only && all.size() == 39605;
    return {pass, std::to_string(s.size()) + " records -> " + a + "/" + b + "/" + c + "%" +
                      (holdout_only ? ", test is Peterborough only" : ", holdout leaked")};
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::map<std::string, std::uint64_t> tree_hashes(const std::filesystem::path& root) {
    std::map<std::string, std::uint64_t> out;
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
        if (e.is_regular_file())
            out[std::filesystem::relative(e.path(), root).generic_string()] = fnv1a(read_text_file(e.path()));
    return out;
}

// 10
Outcome determinism() {
    fixtures::TempDir dir("acceptance_det");
    const nlohmann::json config{
        {"seed", 1010},
        {"synth", {{"geographies", {{{"name", "Cambridge"}, {"count", 480}}, {{"name", "Peterborough"}, {"count", 120}}}},
                   {"embedding_dim", 16}}},
        {"model", {{"baselines", {"majority", "knn", "svm", "logreg"}}, {"svm_max_iter", 200}, {"train", {{"epochs", 10}}}}},
        {"ablation", {{"preset", "table4"}, {"train", {{"epochs", 3}}}}},
        {"attribution", {{"limit", 30}}}};
    write_text_file(dir / "config.json", config.dump(2));
    std::string failure;
    auto run_all = [&](const std::string& out) {
        for (std::string cmd : {"synth", "train", "eval", "ablate", "attribute"}) {
            std::string cfg = (dir / "config.json").string(), o = out;
            std::string prog = "epcfuse", flag_c = "--config", flag_o = "--out";
            std::vector<char*> argv{prog.data(), cmd.data(), flag_c.data(), cfg.data(), flag_o.data(), o.data()};
            std::ostringstream log, err;
            if (cli::run_cli(static_cast<int>(argv.size()), argv.data(), log, err) != cli::kExitOk && failure.empty())
                failure = cmd + ": " + err.str();
        }
    };
    run_all((dir / "run1").string());
    run_all((dir / "run2").string());
    if (!failure.empty()) return {false, "pipeline failed: " + failure};
    const auto a = tree_hashes(dir / "run1");
    const auto b = tree_hashes(dir / "run2");
    int differing = 0;
    for (const auto& [name, h] : a) differing += !b.count(name) || b.at(name) != h;
    const bool pass = a.size() == b.size() && differing == 0 && !a.empty();
    return {pass, std::to_string(a.size()) + " files per tree, " + std::to_string(differing) + " differ"};
}

// 11
Outcome ablation_completeness() {
    const auto spec = eval::table4_ablation_spec();
    std::map<std::size_t, int> by_size;
    for (const auto& s : spec.feature_subsets) ++by_size[s.size()];
    const std::set<std::set<FC>> expected{
        {FC::AV}, {FC::SV}, {FC::SegSV}, {FC::EC}, {FC::FP}, {FC::LST},
        {FC::SV, FC::AV}, {FC::AV, FC::FP}, {FC::AV, FC::LST}, {FC::SV, FC::FP}, {FC::SV, FC::LST}, {FC::LST, FC::FP},
        {FC::AV, FC::LST, FC::FP}, {FC::SV, FC::AV, FC::LST}, {FC::SV, FC::AV, FC::FP}, {FC::SV, FC::LST, FC::FP},
        {FC::SV, FC::AV, FC::LST, FC::FP}, {FC::SV, FC::AV, FC::LST, FC::FP, FC::EC}};

    eval::SynthConfig sc;
    sc.geographies = {{"Cambridge", 200}, {"Peterborough", 50}};
    sc.embedding_dim = 4;
    sc.seed = 1111;
    const auto data = eval::synth_generate(sc);
    dataset::SplitSpec sp;
    sp.fractions = {0.8, 0.2, 0.0};
    sp.holdout_geography = "Peterborough";
    sp.seed = 1111;
    auto run_spec = spec;
    run_spec.train.epochs = 1;
    const auto result = eval::run_ablation(data, dataset::split_dataset(data, sp), run_spec);
    std::map<HeadKind, std::set<std::set<FC>>> rows;
    std::map<HeadKind, int> counts;
    for (const auto& r : result.rows) {
        ++counts[r.head];
        rows[r.head].insert(std::set<FC>(r.subset.begin(), r.subset.end()));
    }
    const bool pass = by_size == std::map<std::size_t, int>{{1, 6}, {2, 6}, {3, 4}, {4, 1}, {5, 1}} &&
                      counts[HeadKind::Linear] == 18 && counts[HeadKind::Mlp] == 18 &&
                      rows[HeadKind::Linear] == expected && rows[HeadKind::Mlp] == expected;
    std::ostringstream s;
    s << "linear " << counts[HeadKind::Linear] << " rows, mlp " << counts[HeadKind::Mlp] << " rows, sizes";
    for (const auto& [n, c] : by_size) s << " " << n << ":" << c;
    return {pass, s.str()};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"metric oracle", metric_oracle},
        {"published deltas to majority", published_deltas},
        {"majority macro recall 50.00", majority_identity},
        {"analytic vs finite-difference gradients", gradient_check},
        {"integrated gradients completeness", integrated_gradients_check},
        {"zonal statistics oracle", zonal_oracle},
        {"k-means and k-NN oracles", kmeans_knn_oracles},
        {"synthetic fusion ordering", fusion_ordering},
        {"split fidelity", split_fidelity},
        {"pipeline determinism", determinism},
        {"ablation grid completeness", ablation_completeness},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failed, criteria.size());
    return failed ? 1 : 0;
}
