#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "epc/core/matrix.hpp"
#include "epc/dataset/records.hpp"

namespace epc::fusion {

using dataset::BinaryClass;
using dataset::FeatureChannel;

struct Standardization {
    double mean = 0.0;
    double stddev = 1.0;
};

// z-score parameters for the scalar channels, fitted on the training split.
using ScalarStats = std::map<FeatureChannel, Standardization>;

// Population mean/stddev of each requested scalar channel over `train_ids`
// (records lacking the channel are skipped). A zero spread maps to stddev 1.
ScalarStats compute_scalar_stats(const dataset::Dataset& data, std::span<const std::string> train_ids,
                                 std::span<const FeatureChannel> channels);

struct ChannelSlice {
    FeatureChannel channel;
    std::size_t offset;
    std::size_t length;
};

// Position of each present channel in the concatenated input vector.
struct FusionLayout {
    std::vector<ChannelSlice> slices;  // canonical channel order
    std::size_t dim = 0;

    static FusionLayout from_dims(const std::vector<std::pair<FeatureChannel, std::size_t>>& dims);
    std::vector<FeatureChannel> channels() const;
};

FusionLayout layout_for(const dataset::Dataset& data, std::vector<FeatureChannel> channels);

struct FusionInput {
    FusionLayout layout;
    std::vector<double> vector;

    std::size_t dim() const { return vector.size(); }
};

// Canonical-order concatenation of the requested channels of `record`; scalar
// channels are z-scored with `stats`. Throws DataError naming a missing channel.
FusionInput concat_features(const dataset::Dataset& data, const dataset::BuildingRecord& record,
                            std::vector<FeatureChannel> channels, const ScalarStats& stats);

// Design matrix for a list of records, rows in `ids` order.
struct FeatureSet {
    Matrix x;
    std::vector<BinaryClass> y;
    std::vector<std::string> ids;
    FusionLayout layout;
};

FeatureSet build_feature_set(const dataset::Dataset& data, std::span<const std::string> ids,
                             std::vector<FeatureChannel> channels, const ScalarStats& stats);

} // namespace epc::fusion
