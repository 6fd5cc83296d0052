#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "epc/dataset/split.hpp"
#include "epc/fusion/adam.hpp"
#include "epc/fusion/features.hpp"
#include "epc/fusion/head.hpp"

namespace epc::fusion {

struct TrainConfig {
    double learning_rate = 1e-4;
    std::size_t batch_size = 16;
    std::size_t epochs = 50;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double dropout_p = 0.5;  // mlp only
    bool class_weighted = true;
    std::uint64_t seed = 0;

    void validate() const;
    AdamConfig adam() const { return {learning_rate, beta1, beta2, epsilon}; }
};

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    double validation_loss = 0.0;
    double validation_f1 = 0.0;
};

struct TrainHistory {
    std::vector<EpochRecord> epochs;
    std::size_t best_epoch = 0;
    std::uint64_t rng_fingerprint = 0;

    friend bool operator==(const TrainHistory& a, const TrainHistory& b) {
        if (a.best_epoch != b.best_epoch || a.rng_fingerprint != b.rng_fingerprint ||
            a.epochs.size() != b.epochs.size())
            return false;
        for (std::size_t i = 0; i < a.epochs.size(); ++i) {
            const auto& x = a.epochs[i];
            const auto& y = b.epochs[i];
            if (x.epoch != y.epoch || x.train_loss != y.train_loss || x.validation_loss != y.validation_loss ||
                x.validation_f1 != y.validation_f1)
                return false;
        }
        return true;
    }
};

struct TrainedHead {
    HeadParameters params;
    FusionLayout layout;
    ScalarStats stats;
    TrainConfig config;
    std::array<double, 2> class_weights{1.0, 1.0};
    TrainHistory history;

    std::vector<FeatureChannel> channels() const { return layout.channels(); }
};

// Trains with Adam on mini-batches (last batch may be short) of the mean
// class-weighted cross-entropy. Rows are ordered by id before the per-epoch
// seeded shuffle, so storage order has no effect. Returns the parameters of
// the epoch with the highest validation macro-F1 (earliest on ties).
// Class weights come from `train` labels. `stats` are carried into the result.
TrainedHead train_head(const FeatureSet& train, const FeatureSet& validation, HeadKind kind, const TrainConfig& config,
                       const ScalarStats& stats = {});

// Builds train/validation feature sets from `split` (scalar stats fitted on
// train) and trains. Throws DataError when a record lacks a requested channel.
TrainedHead train_head(const dataset::Dataset& data, const dataset::DatasetSplit& split,
                       const std::vector<FeatureChannel>& channels, HeadKind kind, const TrainConfig& config);

// Eval-mode predictions for every row.
std::vector<dataset::BinaryClass> predict_all(const HeadParameters& params, const Matrix& x);

// Metadata JSON plus one EMB1 blob per tensor in the order W1,b1,W2,b2 (mlp)
// or W,b (linear), named "<stem>.<tensor>.emb".
void save_head(const TrainedHead& head, const std::filesystem::path& json_path);
TrainedHead load_head(const std::filesystem::path& json_path);

std::string format_history_csv(const TrainHistory& history);

nlohmann::ordered_json train_config_to_json(const TrainConfig& config);
// Overlays the keys present in `doc` on `base`; unknown keys are a ConfigError.
TrainConfig train_config_from_json(const nlohmann::json& doc, TrainConfig base = {});

} // namespace epc::fusion
