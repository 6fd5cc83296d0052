#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epc/attribution/integrated_gradients.hpp"
#include "epc/classic/classifiers.hpp"
#include "epc/cleaning/decisions.hpp"
#include "epc/cleaning/image_ops.hpp"
#include "epc/dataset/lst.hpp"
#include "epc/dataset/split.hpp"
#include "epc/eval/ablation.hpp"
#include "epc/eval/report.hpp"
#include "epc/eval/synth.hpp"
#include "epc/fusion/train.hpp"

namespace epc::cli {

namespace fs = std::filesystem;
using dataset::FeatureChannel;

struct PathsConfig {
    std::optional<fs::path> manifest;
    std::optional<fs::path> footprints;
    std::vector<fs::path> rasters;  // LST grids; a directory entry expands to its *.asc files
    std::map<FeatureChannel, fs::path> embeddings;
    std::optional<fs::path> dataset;  // normalised dataset dir; default <out>/dataset
};

struct IngestSettings {
    double ground_temp_threshold = dataset::kDefaultGroundTempThreshold;
    dataset::LstReducer reducer = dataset::LstReducer::Mean;
};

struct SplitSettings {
    std::optional<std::array<std::size_t, 3>> counts;
    std::array<double, 3> fractions = {0.8, 0.1, 0.1};
    std::optional<std::string> holdout_geography;
    // Records lacking any of these are excluded before splitting. Empty means
    // every channel the dataset carries.
    std::vector<FeatureChannel> require_channels;
};

struct CleanSettings {
    FeatureChannel channel = FeatureChannel::SV;
    std::size_t k = 40;
    std::size_t max_iter = 300;
    std::optional<fs::path> images_dir;  // "<dir>/<id><ext>" per record, for montages
    std::string image_ext = ".png";
    cleaning::MontageOptions montage;
    std::optional<fs::path> decisions;
    std::optional<fs::path> aerial_dir;  // empty-aerial detection when set
    std::string aerial_ext = ".png";
    Rgb sentinel_rgb = cleaning::kDefaultSentinelRgb;
    std::size_t sentinel_min_matches = 4;
    std::optional<std::string> query_id;  // semantic search seed record
    std::size_t query_k = 10;
};

struct ModelSettings {
    fusion::HeadKind head = fusion::HeadKind::Mlp;
    std::vector<FeatureChannel> channels = {FeatureChannel::SV, FeatureChannel::AV, FeatureChannel::LST,
                                            FeatureChannel::FP};
    fusion::TrainConfig train;
    std::vector<classic::ClassifierKind> baselines = {classic::ClassifierKind::Majority};
    std::vector<FeatureChannel> baseline_channels;  // empty means `channels`
    classic::ClassifierConfig classic;              // hyperparameters shared by baselines
    bool search = false;                            // validation grid search for knn k / svm C
};

struct AttributionSettings {
    std::size_t steps = 50;
    attribution::BaselineKind baseline = attribution::BaselineKind::SeededRandom;
    std::vector<double> explicit_baseline;
    std::size_t limit = 0;  // first N test ids in sorted order; 0 means all
};

struct RunConfig {
    std::optional<std::uint64_t> seed;
    fs::path out = "out";
    PathsConfig paths;
    IngestSettings ingest;
    SplitSettings split;
    CleanSettings clean;
    ModelSettings model;
    eval::SynthConfig synth;
    eval::AblationSpec ablation = eval::table4_ablation_spec();
    AttributionSettings attribution;
    eval::ReportFormat report_format = eval::ReportFormat::Csv;

    std::uint64_t require_seed() const;
    fs::path dataset_dir() const { return paths.dataset ? *paths.dataset : out / "dataset"; }
    // Pushes the global seed into every seeded section.
    void apply_seed();
};

// Relative paths resolve against `base_dir`. Unknown keys are a ConfigError.
RunConfig parse_run_config(const nlohmann::json& doc, const fs::path& base_dir);
RunConfig load_run_config(const fs::path& path);

// Resolved settings without the output path.
nlohmann::ordered_json effective_config_json(const RunConfig& config);

} // namespace epc::cli
