#include "epc/fusion/features.hpp"

#include <algorithm>
#include <cmath>

namespace epc::fusion {

using dataset::canonical_channels;
using dataset::channel_name;
using dataset::is_embedding;

ScalarStats compute_scalar_stats(const dataset::Dataset& data, std::span<const std::string> train_ids,
                                 std::span<const FeatureChannel> channels) {
    ScalarStats stats;
    for (const auto c : channels) {
        if (is_embedding(c)) continue;
        double sum = 0.0, sum_sq = 0.0;
        std::size_t n = 0;
        for (const auto& id : train_ids) {
            const auto& r = data.at(id);
            if (!data.has_channel(r, c)) continue;
            const double v = data.scalar(r, c);
            sum += v;
            ++n;
        }
        Standardization s;
        if (n > 0) {
            s.mean = sum / static_cast<double>(n);
            for (const auto& id : train_ids) {
                const auto& r = data.at(id);
                if (!data.has_channel(r, c)) continue;
                const double dv = data.scalar(r, c) - s.mean;
                sum_sq += dv * dv;
            }
            const double sd = std::sqrt(sum_sq / static_cast<double>(n));
            s.stddev = sd > 0.0 ? sd : 1.0;
        }
        stats[c] = s;
    }
    return stats;
}

FusionLayout FusionLayout::from_dims(const std::vector<std::pair<FeatureChannel, std::size_t>>& dims) {
    FusionLayout layout;
    auto sorted = dims;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [c, len] : sorted) {
        if (!layout.slices.empty() && layout.slices.back().channel == c) continue;
        layout.slices.push_back({c, layout.dim, len});
        layout.dim += len;
    }
    return layout;
}

std::vector<FeatureChannel> FusionLayout::channels() const {
    std::vector<FeatureChannel> out;
    for (const auto& s : slices) out.push_back(s.channel);
    return out;
}

FusionLayout layout_for(const dataset::Dataset& data, std::vector<FeatureChannel> channels) {
    std::vector<std::pair<FeatureChannel, std::size_t>> dims;
    for (const auto c : canonical_channels(std::move(channels))) dims.emplace_back(c, data.channel_dim(c));
    return FusionLayout::from_dims(dims);
}

namespace {

void fill_row(const dataset::Dataset& data, const dataset::BuildingRecord& record, const FusionLayout& layout,
              const ScalarStats& stats, std::span<double> out) {
    for (const auto& slice : layout.slices) {
        if (!data.has_channel(record, slice.channel))
            throw DataError("record '" + record.id + "' is missing channel " + std::string(channel_name(slice.channel)));
        if (is_embedding(slice.channel)) {
            const auto row = data.embedding(record, slice.channel);
            if (row.size() != slice.length) throw DataError("embedding width changed within dataset");
            for (std::size_t j = 0; j < slice.length; ++j) out[slice.offset + j] = row[j];
        } else {
            const auto it = stats.find(slice.channel);
            if (it == stats.end())
                throw InvalidArgument("no standardization stats for channel " +
                                      std::string(channel_name(slice.channel)));
            out[slice.offset] = (data.scalar(record, slice.channel) - it->second.mean) / it->second.stddev;
        }
    }
}

} // namespace

FusionInput concat_features(const dataset::Dataset& data, const dataset::BuildingRecord& record,
                            std::vector<FeatureChannel> channels, const ScalarStats& stats) {
    for (const auto c : channels)
        if (!data.has_channel(record, c))
            throw DataError("record '" + record.id + "' is missing channel " + std::string(channel_name(c)));
    FusionInput input;
    input.layout = layout_for(data, std::move(channels));
    input.vector.assign(input.layout.dim, 0.0);
    fill_row(data, record, input.layout, stats, input.vector);
    return input;
}

FeatureSet build_feature_set(const dataset::Dataset& data, std::span<const std::string> ids,
                             std::vector<FeatureChannel> channels, const ScalarStats& stats) {
    FeatureSet set;
    set.layout = layout_for(data, std::move(channels));
    set.x = Matrix(ids.size(), set.layout.dim);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& r = data.at(ids[i]);
        fill_row(data, r, set.layout, stats, set.x.row(i));
        set.y.push_back(r.binary);
        set.ids.push_back(r.id);
    }
    return set;
}

} // namespace epc::fusion
