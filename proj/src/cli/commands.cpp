#include "epc/cli/commands.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include <CLI11.hpp>

#include "epc/classic/search.hpp"
#include "epc/cleaning/image_ops.hpp"
#include "epc/cleaning/kmeans.hpp"
#include "epc/cleaning/neighbors.hpp"
#include "epc/core/image.hpp"
#include "epc/core/text.hpp"

namespace epc::cli {

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kAttributionBaselineStream = 0xA77;

// Output directory of one command, with the effective config echoed into it.
fs::path prepare_stage(const RunConfig& config, std::string_view stage) {
    const fs::path dir = config.out / std::string(stage);
    fs::create_directories(dir);
    write_text_file(dir / "effective_config.json", effective_config_json(config).dump(2) + "\n");
    return dir;
}

void require_file(const std::optional<fs::path>& path, std::string_view what) {
    if (!path) throw ConfigError(std::string(what) + " path is not configured");
    if (!fs::exists(*path)) throw ConfigError(std::string(what) + " not found: " + path->string());
}

dataset::Dataset load_working_dataset(const RunConfig& config) {
    const auto dir = config.dataset_dir();
    if (!fs::exists(dir / "records.csv"))
        throw ConfigError("dataset not found at " + dir.string() + " (run ingest or synth first)");
    return dataset::load_dataset(dir);
}

// Channels carried by at least one record.
std::vector<FeatureChannel> carried_channels(const dataset::Dataset& data) {
    std::vector<FeatureChannel> out;
    for (const auto c : dataset::kAllChannels) {
        if (std::any_of(data.records().begin(), data.records().end(),
                        [&](const auto& r) { return data.has_channel(r, c); }))
            out.push_back(c);
    }
    return out;
}

struct Working {
    dataset::Dataset data;
    dataset::DatasetSplit split;
    std::size_t excluded = 0;
};

// Dataset restricted to records carrying the required channels, and its split.
Working working_split(const RunConfig& config) {
    auto full = load_working_dataset(config);
    auto required = config.split.require_channels.empty() ? carried_channels(full) : config.split.require_channels;
    auto ids = full.complete_ids(required);
    Working w;
    w.excluded = full.size() - ids.size();
    w.data = w.excluded == 0 ? std::move(full) : full.filtered(ids);

    dataset::SplitSpec spec;
    spec.counts = config.split.counts;
    spec.fractions = config.split.fractions;
    spec.holdout_geography = config.split.holdout_geography;
    spec.seed = config.require_seed();
    w.split = dataset::split_dataset(w.data, spec);
    return w;
}

std::vector<fs::path> expand_rasters(const std::vector<fs::path>& entries) {
    std::vector<fs::path> out;
    for (const auto& e : entries) {
        if (!fs::exists(e)) throw ConfigError("raster not found: " + e.string());
        if (fs::is_directory(e)) {
            std::vector<fs::path> found;
            for (const auto& f : fs::directory_iterator(e))
                if (f.is_regular_file() && f.path().extension() == ".asc") found.push_back(f.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(e);
        }
    }
    return out;
}

std::string stage_name(const fusion::TrainedHead& head) {
    return std::string(fusion::head_name(head.params.kind())) + " head";
}

fs::path head_path(const RunConfig& config) { return config.out / "train" / "head.json"; }

fs::path baseline_path(const RunConfig& config, classic::ClassifierKind kind) {
    return config.out / "train" / "baselines" / (std::string(classic::kind_name(kind)) + ".json");
}

fusion::TrainedHead load_trained_head(const RunConfig& config) {
    const auto path = head_path(config);
    if (!fs::exists(path)) throw ConfigError("trained head not found at " + path.string() + " (run train first)");
    return fusion::load_head(path);
}

std::vector<FeatureChannel> baseline_channels(const RunConfig& config) {
    return config.model.baseline_channels.empty() ? config.model.channels
                                                  : dataset::canonical_channels(config.model.baseline_channels);
}

ordered_json report_json(const eval::MetricReport& r) {
    ordered_json doc;
    doc["precision_macro"] = r.precision_macro;
    doc["recall_macro"] = r.recall_macro;
    doc["f1_macro"] = r.f1_macro;
    auto per_class = ordered_json::array();
    for (std::size_t c = 0; c < 2; ++c) {
        const auto& s = r.per_class[c];
        per_class.push_back({{"class", c},
                             {"precision", s.precision},
                             {"recall", s.recall},
                             {"f1", s.f1},
                             {"support", s.support},
                             {"precision_undefined", s.precision_undefined},
                             {"recall_undefined", s.recall_undefined}});
    }
    doc["per_class"] = per_class;
    doc["confusion"] = {{r.matrix.counts[0][0], r.matrix.counts[0][1]}, {r.matrix.counts[1][0], r.matrix.counts[1][1]}};
    return doc;
}

void write_report(const fs::path& dir, std::string_view stem, const std::vector<eval::ReportRow>& rows,
                  eval::ReportFormat format) {
    const char* ext = format == eval::ReportFormat::Csv ? ".csv" : ".md";
    write_text_file(dir / (std::string(stem) + ext), eval::render_report(rows, format));
}

} // namespace

void cmd_ingest(const RunConfig& config, std::ostream& log) {
    require_file(config.paths.manifest, "manifest");
    require_file(config.paths.footprints, "footprints");
    for (const auto& [channel, path] : config.paths.embeddings)
        if (!fs::exists(path))
            throw ConfigError(std::string(dataset::channel_name(channel)) + " embeddings not found: " + path.string());
    const auto raster_files = expand_rasters(config.paths.rasters);

    const auto manifest = dataset::read_manifest(*config.paths.manifest);
    const auto footprints = dataset::read_footprints_geojson(*config.paths.footprints);

    std::vector<dataset::LocatedPoint> points;
    for (const auto& r : manifest) points.push_back({r.id, r.centroid});
    const auto join = dataset::spatial_join(points, footprints.footprints);
    std::map<std::string, const dataset::FootprintPolygon*> polygon_by_id;
    for (const auto& f : footprints.footprints) polygon_by_id[f.id] = &f.polygon;

    std::vector<dataset::LstObservation> observations;
    for (const auto& f : raster_files) observations.push_back(dataset::read_lst_grid(f));

    dataset::Dataset data;
    std::vector<std::string> lst_missing;
    for (auto record : manifest) {
        const auto hit = join.matched.find(record.id);
        if (hit == join.matched.end()) continue;
        const auto& polygon = *polygon_by_id.at(hit->second);
        record.footprint = polygon;
        record.footprint_area = dataset::footprint_area(polygon);
        record.centroid = polygon.centroid();
        if (!observations.empty())
            record.lst = dataset::lst_zonal_aggregate(observations, polygon, config.ingest.ground_temp_threshold,
                                                      config.ingest.reducer);
        if (!record.lst) lst_missing.push_back(record.id);
        data.add_record(std::move(record));
    }
    for (const auto& [channel, path] : config.paths.embeddings)
        data.attach_embeddings(channel, dataset::read_embeddings(path, channel));

    const auto dir = prepare_stage(config, "ingest");
    dataset::save_dataset(data, config.dataset_dir());

    std::string text;
    text += "manifest_records " + std::to_string(manifest.size()) + "\n";
    text += "footprints " + std::to_string(footprints.footprints.size()) + "\n";
    text += "lst_observations " + std::to_string(observations.size()) + "\n";
    for (const auto& w : footprints.warnings) text += "footprint_warning " + w + "\n";
    text += "unmatched " + std::to_string(join.unmatched.size()) + "\n";
    for (const auto& id : join.unmatched) text += "unmatched_id " + id + "\n";
    text += "records " + std::to_string(data.size()) + "\n";
    text += "missing LST " + std::to_string(lst_missing.size()) + "\n";
    for (const auto& id : lst_missing) text += "missing_id LST " + id + "\n";
    for (const auto c : dataset::kAllChannels) {
        if (!dataset::is_embedding(c)) continue;
        std::vector<std::string> missing;
        for (const auto& r : data.records())
            if (!data.has_channel(r, c)) missing.push_back(r.id);
        text += "missing " + std::string(dataset::channel_name(c)) + " " + std::to_string(missing.size()) + "\n";
        if (missing.size() != data.size())
            for (const auto& id : missing) text += "missing_id " + std::string(dataset::channel_name(c)) + " " + id + "\n";
    }
    write_text_file(dir / "ingest_log.txt", text);
    log << "ingest: " << data.size() << " records (" << join.unmatched.size() << " unmatched, " << lst_missing.size()
        << " without LST)\n";
}

void cmd_clean(const RunConfig& config, std::ostream& log) {
    const auto& s = config.clean;
    if (s.decisions) require_file(s.decisions, "decisions file");
    if (s.images_dir && !fs::is_directory(*s.images_dir))
        throw ConfigError("images_dir not found: " + s.images_dir->string());
    if (s.aerial_dir && !fs::is_directory(*s.aerial_dir))
        throw ConfigError("aerial_dir not found: " + s.aerial_dir->string());

    const auto data = load_working_dataset(config);
    if (!data.embeddings().count(s.channel))
        throw DataError("dataset has no " + std::string(dataset::channel_name(s.channel)) + " embeddings");
    std::vector<std::string> ids;
    Matrix points(0, data.channel_dim(s.channel));
    for (const auto& r : data.records()) {
        if (!data.has_channel(r, s.channel)) continue;
        ids.push_back(r.id);
        const auto row = data.embedding(r, s.channel);
        points.append_row(std::vector<double>(row.begin(), row.end()));
    }
    if (ids.empty()) throw DataError("no record carries the cleaning channel");

    const auto dir = prepare_stage(config, "clean");
    const auto model = cleaning::kmeans(points, s.k, config.require_seed(), s.max_iter);
    cleaning::save_cluster_model(model, ids, dir / "cluster_model.json");
    write_text_file(dir / "decisions_template.csv", cleaning::decisions_template(model));

    if (s.images_dir) {
        std::vector<std::optional<fs::path>> paths;
        for (const auto& id : ids) paths.emplace_back(*s.images_dir / (id + s.image_ext));
        std::string missing = "cluster,path\n";
        for (std::size_t c = 0; c < model.k; ++c) {
            if (model.members(c).empty()) continue;
            const auto montage = cleaning::export_cluster_montage(model, points, paths, c, s.montage);
            char name[48];
            std::snprintf(name, sizeof name, "cluster_%03zu.png", c);
            save_png(montage.image, dir / "montages" / name);
            for (const auto& m : montage.missing)
                missing += std::to_string(c) + "," + csv_field(fs::path(m).filename().string()) + "\n";
        }
        write_text_file(dir / "montage_missing.csv", missing);
    }

    if (s.query_id) {
        const auto it = std::find(ids.begin(), ids.end(), *s.query_id);
        if (it == ids.end()) throw DataError("query id '" + *s.query_id + "' has no cleaning embedding");
        const auto q = static_cast<std::size_t>(it - ids.begin());
        const auto hits = cleaning::nearest_neighbors(points.row(q), points, std::min(s.query_k, ids.size()));
        std::string csv = "rank,id,distance\n";
        for (std::size_t i = 0; i < hits.size(); ++i)
            csv += std::to_string(i + 1) + "," + csv_field(ids[hits[i].index]) + "," + format_exact(hits[i].distance) + "\n";
        write_text_file(dir / "neighbors.csv", csv);
    }

    std::vector<cleaning::Removal> aerial_removed;
    if (s.aerial_dir) {
        std::string csv = "id,status\n";
        for (const auto& r : data.records()) {
            const auto path = *s.aerial_dir / (r.id + s.aerial_ext);
            if (!fs::exists(path)) {
                csv += csv_field(r.id) + ",missing\n";
                continue;
            }
            const auto image = load_image(path);
            auto signature = cleaning::SentinelSignature::corners(image.width(), image.height(), s.sentinel_rgb);
            signature.min_matches = s.sentinel_min_matches;
            if (cleaning::detect_empty_aerial(image, signature)) {
                csv += csv_field(r.id) + ",empty\n";
                aerial_removed.push_back({r.id, 0, "empty_aerial"});
            }
        }
        write_text_file(dir / "aerial_check.csv", csv);
    }

    if (s.decisions || !aerial_removed.empty()) {
        const auto decisions = s.decisions ? cleaning::read_decisions(*s.decisions) : std::vector<cleaning::CleaningDecision>{};
        auto outcome = cleaning::apply_cleaning_decisions(ids, model, decisions);
        std::set<std::string> removed_ids;
        for (const auto& r : outcome.removed) removed_ids.insert(r.id);
        for (const auto& r : aerial_removed)
            if (removed_ids.insert(r.id).second) outcome.removed.push_back(r);
        // Records without the cleaning channel are kept as-is.
        const auto cleaned = cleaning::remove_ids(data, outcome);
        dataset::save_dataset(cleaned, dir / "dataset");
        write_text_file(dir / "removed.csv", cleaning::format_removal_report(outcome));
        log << "clean: removed " << outcome.removed.size() << " of " << data.size() << " records\n";
    }
    log << "clean: k=" << model.k << " objective=" << format_exact(model.objective) << " after "
        << model.iterations_run << " iterations\n";
}

void cmd_train(const RunConfig& config, std::ostream& log) {
    const auto w = working_split(config);
    const auto dir = prepare_stage(config, "train");
    dataset::save_split(w.split, dir / "split.csv");

    const auto head = fusion::train_head(w.data, w.split, config.model.channels, config.model.head, config.model.train);
    fusion::save_head(head, dir / "head.json");
    write_text_file(dir / "history.csv", fusion::format_history_csv(head.history));

    ordered_json summary;
    summary["records"] = w.data.size();
    summary["excluded_missing_channels"] = w.excluded;
    summary["train"] = w.split.train.size();
    summary["validation"] = w.split.validation.size();
    summary["test"] = w.split.test.size();
    summary["best_epoch"] = head.history.best_epoch;
    summary["rng_fingerprint"] = head.history.rng_fingerprint;
    summary["class_weights"] = head.class_weights;

    if (!config.model.baselines.empty()) {
        const auto channels = baseline_channels(config);
        const auto stats = fusion::compute_scalar_stats(w.data, w.split.train, channels);
        const auto train = fusion::build_feature_set(w.data, w.split.train, channels, stats);
        const auto val = fusion::build_feature_set(w.data, w.split.validation, channels, stats);
        auto searches = ordered_json::object();
        for (const auto kind : config.model.baselines) {
            auto cc = config.model.classic;
            cc.kind = kind;
            if (config.model.search && (kind == classic::ClassifierKind::Knn || kind == classic::ClassifierKind::Svm)) {
                auto score = [&](const classic::ClassifierConfig& candidate) {
                    const auto m = classic::fit_classifier(train.x, train.y, candidate);
                    return eval::macro_metrics(eval::confusion(val.y, m.predict(val.x)));
                };
                std::vector<classic::ClassifierConfig> grid;
                if (kind == classic::ClassifierKind::Knn)
                    for (const auto k : classic::default_knn_k_grid()) { grid.push_back(cc); grid.back().knn_k = k; }
                else
                    for (const auto c : classic::default_svm_c_grid()) { grid.push_back(cc); grid.back().svm_c = c; }
                const auto result = classic::hyperparam_search(std::span<const classic::ClassifierConfig>(grid), score);
                cc = result.best;
                auto scores = ordered_json::array();
                for (std::size_t i = 0; i < grid.size(); ++i)
                    scores.push_back({{kind == classic::ClassifierKind::Knn ? "knn_k" : "svm_c",
                                       kind == classic::ClassifierKind::Knn ? ordered_json(grid[i].knn_k)
                                                                            : ordered_json(grid[i].svm_c)},
                                      {"validation_f1_macro", result.reports[i].f1_macro}});
                searches[std::string(classic::kind_name(kind))] = scores;
            }
            const auto model = classic::fit_classifier(train.x, train.y, cc);
            classic::save_classifier(model, baseline_path(config, kind));
        }
        if (!searches.empty()) summary["search"] = searches;
    }
    write_text_file(dir / "train_summary.json", summary.dump(2) + "\n");
    log << "train: " << stage_name(head) << " best epoch " << head.history.best_epoch << " of "
        << head.history.epochs.size() << "\n";
}

void cmd_eval(const RunConfig& config, std::ostream& log) {
    const auto head = load_trained_head(config);
    for (const auto kind : config.model.baselines)
        if (!fs::exists(baseline_path(config, kind)))
            throw ConfigError("baseline model not found: " + baseline_path(config, kind).string());
    const auto w = working_split(config);
    const auto dir = prepare_stage(config, "eval");

    const auto mm = eval::majority_report(w.data, w.split);
    std::vector<eval::ReportRow> rows{{"baseline", "majority", "majority", mm, std::nullopt}};
    ordered_json metrics;
    metrics["test_records"] = w.split.test.size();
    metrics["majority"] = report_json(mm);

    if (!config.model.baselines.empty()) {
        const auto channels = baseline_channels(config);
        const auto stats = fusion::compute_scalar_stats(w.data, w.split.train, channels);
        const auto test = fusion::build_feature_set(w.data, w.split.test, channels, stats);
        for (const auto kind : config.model.baselines) {
            if (kind == classic::ClassifierKind::Majority) continue;  // already the reference row
            const auto model = classic::load_classifier(baseline_path(config, kind));
            const auto report = eval::macro_metrics(eval::confusion(test.y, model.predict(test.x)));
            const std::string name(classic::kind_name(kind));
            rows.push_back({"classic", dataset::channel_set_label(channels), name, report, eval::delta_to_majority(report, mm)});
            metrics[name] = report_json(report);
        }
    }
    const auto report = eval::evaluate_head(w.data, w.split.test, head);
    const std::string head_name(fusion::head_name(head.params.kind()));
    rows.push_back({"fusion", dataset::channel_set_label(head.channels()), head_name, report,
                    eval::delta_to_majority(report, mm)});
    metrics[head_name + "_head"] = report_json(report);

    write_report(dir, "report", rows, config.report_format);
    write_text_file(dir / "metrics.json", metrics.dump(2) + "\n");
    log << "eval: " << head_name << " head macro-F1 " << format_fixed(100.0 * report.f1_macro, 2) << "% ("
        << eval::format_delta(eval::delta_to_majority(report, mm)) << " ppt vs majority)\n";
}

void cmd_ablate(const RunConfig& config, std::ostream& log) {
    const auto w = working_split(config);
    const auto dir = prepare_stage(config, "ablate");
    write_text_file(dir / "spec.json", eval::ablation_spec_to_json(config.ablation).dump(2) + "\n");
    const auto result = eval::run_ablation(w.data, w.split, config.ablation);
    write_report(dir, "ablation", eval::ablation_report_rows(result), config.report_format);
    log << "ablate: " << result.rows.size() << " rows\n";
}

void cmd_attribute(const RunConfig& config, std::ostream& log) {
    const auto head = load_trained_head(config);
    const auto w = working_split(config);
    const auto dir = prepare_stage(config, "attribute");

    std::vector<std::string> ids = w.split.test;
    if (config.attribution.limit > 0 && ids.size() > config.attribution.limit) ids.resize(config.attribution.limit);
    const auto channels = head.channels();
    const auto test = fusion::build_feature_set(w.data, ids, channels, head.stats);
    const auto train = fusion::build_feature_set(w.data, w.split.train, channels, head.stats);
    if (test.x.cols() != head.params.input_dim()) throw DataError("attribute: feature dimension does not match head");

    attribution::AttributionConfig ac;
    ac.steps = config.attribution.steps;
    ac.baseline = config.attribution.baseline;
    ac.baseline_seed = derive_seed(config.require_seed(), kAttributionBaselineStream);
    ac.explicit_baseline = config.attribution.explicit_baseline;
    ac.validate();
    const auto ranges = attribution::CoordinateRanges::from_rows(train.x);
    const auto baseline = attribution::make_baseline(ac, test.x.cols(), &ranges);

    std::vector<attribution::AttributionRow> rows;
    std::map<FeatureChannel, std::pair<double, double>> totals;  // sum, sum of |.|
    double max_relative_gap = 0.0;
    for (std::size_t r = 0; r < test.x.rows(); ++r) {
        auto result = attribution::integrated_gradients(head.params, test.x.row(r), baseline, ac.steps, &test.layout);
        for (const auto& [c, v] : result.channel_sums) {
            totals[c].first += v;
            totals[c].second += std::abs(v);
        }
        if (result.target_delta != 0.0)
            max_relative_gap = std::max(max_relative_gap, result.completeness_gap / std::abs(result.target_delta));
        rows.push_back({test.ids[r], std::move(result)});
    }
    write_text_file(dir / "attributions.csv", attribution::format_attribution_csv(rows));

    std::string summary = "channel,mean_attribution,mean_abs_attribution\n";
    const double n = std::max<double>(1.0, static_cast<double>(rows.size()));
    for (const auto& [c, t] : totals)
        summary += std::string(dataset::channel_name(c)) + "," + format_exact(t.first / n) + "," +
                   format_exact(t.second / n) + "\n";
    write_text_file(dir / "attribution_summary.csv", summary);
    log << "attribute: " << rows.size() << " records, max relative completeness gap "
        << format_fixed(100.0 * max_relative_gap, 4) << "%\n";
}

void cmd_synth(const RunConfig& config, std::ostream& log) {
    const auto data = eval::synth_generate(config.synth);
    const auto dir = prepare_stage(config, "synth");
    dataset::save_dataset(data, config.dataset_dir());
    std::map<std::string, std::array<std::size_t, 2>> counts;
    for (const auto& r : data.records()) ++counts[r.geography][dataset::class_index(r.binary)];
    std::string text = "geography,efficient,inefficient\n";
    for (const auto& [g, c] : counts) text += csv_field(g) + "," + std::to_string(c[0]) + "," + std::to_string(c[1]) + "\n";
    write_text_file(dir / "summary.csv", text);
    log << "synth: " << data.size() << " records\n";
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Building energy-efficiency fusion pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--seed", seed, "global seed (overrides the config)");
    app.add_option("--out", out_dir, "output directory (overrides the config)");

    using Command = void (*)(const RunConfig&, std::ostream&);
    const std::vector<std::tuple<std::string, std::string, Command>> commands = {
        {"ingest", "join manifest, footprints, LST rasters and embeddings into a dataset", cmd_ingest},
        {"clean", "cluster embeddings, export montages and apply cleaning decisions", cmd_clean},
        {"train", "train the fusion head and baseline classifiers", cmd_train},
        {"eval", "score trained models on the test split", cmd_eval},
        {"ablate", "train and score one head per feature subset", cmd_ablate},
        {"attribute", "integrated-gradients attributions for test records", cmd_attribute},
        {"synth", "generate a synthetic dataset", cmd_synth},
    };
    for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    const auto* sub = app.get_subcommands().front();
    const auto& name = sub->get_name();
    Command fn = nullptr;
    for (const auto& [n, h, f] : commands)
        if (n == name) fn = f;

    try {
        try {
            RunConfig config = config_path.empty() ? RunConfig{} : load_run_config(config_path);
            if (seed) config.seed = seed;
            if (!out_dir.empty()) config.out = out_dir;
            config.apply_seed();
            fn(config, out);
        } catch (const DataError& e) {
            // Malformed ingest inputs are reported as input errors.
            if (name == "ingest") throw ConfigError(e.what());
            throw;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitOk;
}

} // namespace epc::cli
