#include "epc/cli/config.hpp"

#include "epc/core/text.hpp"

namespace epc::cli {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void unknown_key(const std::string& section, const std::string& key) {
    throw ConfigError("unknown key '" + key + "' in " + section);
}

fs::path resolve(const fs::path& base, const json& value) {
    fs::path p = value.get<std::string>();
    return p.is_absolute() || base.empty() ? p : base / p;
}

std::vector<FeatureChannel> channels_from(const json& value) {
    std::vector<FeatureChannel> out;
    for (const auto& c : value) out.push_back(dataset::parse_channel(c.get<std::string>()));
    return out;
}

ordered_json channels_to(const std::vector<FeatureChannel>& channels) {
    auto out = ordered_json::array();
    for (const auto c : channels) out.push_back(std::string(dataset::channel_name(c)));
    return out;
}

Rgb rgb_from(const json& value) {
    if (!value.is_array() || value.size() != 3) throw ConfigError("colour must be a 3-element array");
    Rgb out{};
    for (std::size_t i = 0; i < 3; ++i) {
        const int v = value.at(i).get<int>();
        if (v < 0 || v > 255) throw ConfigError("colour components must lie in 0..255");
        out[i] = static_cast<std::uint8_t>(v);
    }
    return out;
}

void parse_paths(PathsConfig& p, const json& doc, const fs::path& base) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "manifest") p.manifest = resolve(base, value);
        else if (key == "footprints") p.footprints = resolve(base, value);
        else if (key == "rasters") {
            p.rasters.clear();
            if (value.is_string()) p.rasters.push_back(resolve(base, value));
            else for (const auto& r : value) p.rasters.push_back(resolve(base, r));
        } else if (key == "embeddings") {
            for (const auto& [ch, path] : value.items()) {
                const auto c = dataset::parse_channel(ch);
                if (!dataset::is_embedding(c)) throw ConfigError("channel " + ch + " is not an embedding channel");
                p.embeddings[c] = resolve(base, path);
            }
        } else if (key == "dataset") p.dataset = resolve(base, value);
        else unknown_key("paths", key);
    }
}

void parse_ingest(IngestSettings& s, const json& doc) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "ground_temp_threshold") s.ground_temp_threshold = value.get<double>();
        else if (key == "reducer") {
            const auto r = value.get<std::string>();
            if (r == "mean") s.reducer = dataset::LstReducer::Mean;
            else if (r == "median") s.reducer = dataset::LstReducer::Median;
            else throw ConfigError("ingest.reducer must be mean or median");
        } else unknown_key("ingest", key);
    }
}

void parse_split(SplitSettings& s, const json& doc) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "counts") {
            if (value.is_null()) s.counts.reset();
            else s.counts = std::array<std::size_t, 3>{value.at(0).get<std::size_t>(), value.at(1).get<std::size_t>(),
                                                       value.at(2).get<std::size_t>()};
        } else if (key == "fractions") {
            s.fractions = {value.at(0).get<double>(), value.at(1).get<double>(), value.at(2).get<double>()};
        } else if (key == "holdout_geography") {
            if (value.is_null()) s.holdout_geography.reset();
            else s.holdout_geography = value.get<std::string>();
        } else if (key == "require_channels") {
            s.require_channels = channels_from(value);
        } else unknown_key("split", key);
    }
}

void parse_clean(CleanSettings& s, const json& doc, const fs::path& base) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "channel") {
            s.channel = dataset::parse_channel(value.get<std::string>());
            if (!dataset::is_embedding(s.channel)) throw ConfigError("cleaning.channel must be an embedding channel");
        } else if (key == "k") s.k = value.get<std::size_t>();
        else if (key == "max_iter") s.max_iter = value.get<std::size_t>();
        else if (key == "images_dir") s.images_dir = resolve(base, value);
        else if (key == "image_ext") s.image_ext = value.get<std::string>();
        else if (key == "montage") {
            for (const auto& [mk, mv] : value.items()) {
                if (mk == "rows") s.montage.rows = mv.get<int>();
                else if (mk == "cols") s.montage.cols = mv.get<int>();
                else if (mk == "tile_px") s.montage.tile_px = mv.get<int>();
                else unknown_key("cleaning.montage", mk);
            }
        } else if (key == "decisions") s.decisions = resolve(base, value);
        else if (key == "aerial_dir") s.aerial_dir = resolve(base, value);
        else if (key == "aerial_ext") s.aerial_ext = value.get<std::string>();
        else if (key == "sentinel_rgb") s.sentinel_rgb = rgb_from(value);
        else if (key == "sentinel_min_matches") s.sentinel_min_matches = value.get<std::size_t>();
        else if (key == "query_id") s.query_id = value.get<std::string>();
        else if (key == "query_k") s.query_k = value.get<std::size_t>();
        else unknown_key("cleaning", key);
    }
    if (s.k < 1) throw ConfigError("cleaning.k must be at least 1");
    if (s.montage.rows < 1 || s.montage.cols < 1 || s.montage.tile_px < 1)
        throw ConfigError("cleaning.montage dimensions must be positive");
}

void parse_model(ModelSettings& s, const json& doc) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "head") s.head = fusion::parse_head(value.get<std::string>());
        else if (key == "channels") s.channels = channels_from(value);
        else if (key == "train") s.train = fusion::train_config_from_json(value, s.train);
        else if (key == "baselines") {
            s.baselines.clear();
            for (const auto& b : value) s.baselines.push_back(classic::parse_kind(b.get<std::string>()));
        } else if (key == "baseline_channels") s.baseline_channels = channels_from(value);
        else if (key == "knn_k") s.classic.knn_k = value.get<std::size_t>();
        else if (key == "svm_c") s.classic.svm_c = value.get<double>();
        else if (key == "svm_max_iter") s.classic.svm_max_iter = value.get<std::size_t>();
        else if (key == "class_weighted_baselines") s.classic.class_weighted = value.get<bool>();
        else if (key == "sgd_learning_rate") s.classic.sgd_learning_rate = value.get<double>();
        else if (key == "sgd_epochs") s.classic.sgd_epochs = value.get<std::size_t>();
        else if (key == "search") s.search = value.get<bool>();
        else unknown_key("model", key);
    }
    if (s.channels.empty()) throw ConfigError("model.channels must not be empty");
    s.channels = dataset::canonical_channels(s.channels);
    s.train.validate();
}

void parse_attribution(AttributionSettings& s, const json& doc) {
    for (const auto& [key, value] : doc.items()) {
        if (key == "steps") s.steps = value.get<std::size_t>();
        else if (key == "baseline") s.baseline = attribution::parse_baseline(value.get<std::string>());
        else if (key == "explicit_baseline") s.explicit_baseline = value.get<std::vector<double>>();
        else if (key == "limit") s.limit = value.get<std::size_t>();
        else unknown_key("attribution", key);
    }
    if (s.steps < 1) throw ConfigError("attribution.steps must be at least 1");
    if (s.baseline == attribution::BaselineKind::Explicit && s.explicit_baseline.empty())
        throw ConfigError("attribution.explicit_baseline is required for the explicit baseline");
}

} // namespace

std::uint64_t RunConfig::require_seed() const {
    if (!seed) throw ConfigError("a seed is mandatory (config key 'seed' or --seed)");
    return *seed;
}

void RunConfig::apply_seed() {
    const auto s = require_seed();
    model.train.seed = s;
    model.classic.seed = s;
    synth.seed = s;
    ablation.seed = s;
    ablation.train.seed = s;
}

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig cfg;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "out") cfg.out = resolve(base_dir, value);
            else if (key == "paths") parse_paths(cfg.paths, value, base_dir);
            else if (key == "ingest") parse_ingest(cfg.ingest, value);
            else if (key == "split") parse_split(cfg.split, value);
            else if (key == "cleaning") parse_clean(cfg.clean, value, base_dir);
            else if (key == "model") parse_model(cfg.model, value);
            else if (key == "synth") cfg.synth = eval::synth_config_from_json(value, cfg.synth);
            else if (key == "ablation") cfg.ablation = eval::ablation_spec_from_json(value);
            else if (key == "attribution") parse_attribution(cfg.attribution, value);
            else if (key == "report") {
                for (const auto& [rk, rv] : value.items()) {
                    if (rk == "format") cfg.report_format = eval::parse_report_format(rv.get<std::string>());
                    else unknown_key("report", rk);
                }
            } else unknown_key("config", key);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_run_config(doc, path.parent_path());
}

ordered_json effective_config_json(const RunConfig& c) {
    ordered_json doc;
    doc["seed"] = c.seed ? ordered_json(*c.seed) : ordered_json();

    ordered_json paths;
    paths["manifest"] = c.paths.manifest ? ordered_json(c.paths.manifest->generic_string()) : ordered_json();
    paths["footprints"] = c.paths.footprints ? ordered_json(c.paths.footprints->generic_string()) : ordered_json();
    auto rasters = ordered_json::array();
    for (const auto& r : c.paths.rasters) rasters.push_back(r.generic_string());
    paths["rasters"] = rasters;
    auto emb = ordered_json::object();
    for (const auto& [ch, p] : c.paths.embeddings) emb[std::string(dataset::channel_name(ch))] = p.generic_string();
    paths["embeddings"] = emb;
    paths["dataset"] = c.paths.dataset ? ordered_json(c.paths.dataset->generic_string()) : ordered_json("<out>/dataset");
    doc["paths"] = paths;

    doc["ingest"] = {{"ground_temp_threshold", c.ingest.ground_temp_threshold},
                     {"reducer", c.ingest.reducer == dataset::LstReducer::Mean ? "mean" : "median"}};

    ordered_json split;
    split["counts"] = c.split.counts ? ordered_json(*c.split.counts) : ordered_json();
    split["fractions"] = c.split.fractions;
    split["holdout_geography"] = c.split.holdout_geography ? ordered_json(*c.split.holdout_geography) : ordered_json();
    split["require_channels"] = channels_to(c.split.require_channels);
    doc["split"] = split;

    ordered_json clean;
    clean["channel"] = std::string(dataset::channel_name(c.clean.channel));
    clean["k"] = c.clean.k;
    clean["max_iter"] = c.clean.max_iter;
    clean["images_dir"] = c.clean.images_dir ? ordered_json(c.clean.images_dir->generic_string()) : ordered_json();
    clean["image_ext"] = c.clean.image_ext;
    clean["montage"] = {{"rows", c.clean.montage.rows}, {"cols", c.clean.montage.cols},
                        {"tile_px", c.clean.montage.tile_px}};
    clean["decisions"] = c.clean.decisions ? ordered_json(c.clean.decisions->generic_string()) : ordered_json();
    clean["aerial_dir"] = c.clean.aerial_dir ? ordered_json(c.clean.aerial_dir->generic_string()) : ordered_json();
    clean["aerial_ext"] = c.clean.aerial_ext;
    clean["sentinel_rgb"] = c.clean.sentinel_rgb;
    clean["sentinel_min_matches"] = c.clean.sentinel_min_matches;
    clean["query_id"] = c.clean.query_id ? ordered_json(*c.clean.query_id) : ordered_json();
    clean["query_k"] = c.clean.query_k;
    doc["cleaning"] = clean;

    ordered_json model;
    model["head"] = std::string(fusion::head_name(c.model.head));
    model["channels"] = channels_to(c.model.channels);
    model["train"] = fusion::train_config_to_json(c.model.train);
    auto baselines = ordered_json::array();
    for (const auto k : c.model.baselines) baselines.push_back(std::string(classic::kind_name(k)));
    model["baselines"] = baselines;
    model["baseline_channels"] = channels_to(c.model.baseline_channels);
    model["knn_k"] = c.model.classic.knn_k;
    model["svm_c"] = c.model.classic.svm_c;
    model["svm_max_iter"] = c.model.classic.svm_max_iter;
    model["class_weighted_baselines"] = c.model.classic.class_weighted;
    model["sgd_learning_rate"] = c.model.classic.sgd_learning_rate;
    model["sgd_epochs"] = c.model.classic.sgd_epochs;
    model["search"] = c.model.search;
    doc["model"] = model;

    doc["synth"] = eval::synth_config_to_json(c.synth);
    doc["ablation"] = eval::ablation_spec_to_json(c.ablation);
    doc["attribution"] = {{"steps", c.attribution.steps},
                          {"baseline", std::string(attribution::baseline_name(c.attribution.baseline))},
                          {"explicit_baseline", c.attribution.explicit_baseline},
                          {"limit", c.attribution.limit}};
    doc["report"] = {{"format", c.report_format == eval::ReportFormat::Csv ? "csv" : "markdown"}};
    return doc;
}

} // namespace epc::cli
