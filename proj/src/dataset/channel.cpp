#include "epc/dataset/channel.hpp"

#include <algorithm>

#include "epc/core/error.hpp"
#include "epc/core/text.hpp"

namespace epc::dataset {

std::string_view channel_name(FeatureChannel c) {
    switch (c) {
        case FeatureChannel::SV: return "SV";
        case FeatureChannel::AV: return "AV";
        case FeatureChannel::SegSV: return "SegSV";
        case FeatureChannel::LST: return "LST";
        case FeatureChannel::FP: return "FP";
        case FeatureChannel::EC: return "EC";
    }
    return "?";
}

FeatureChannel parse_channel(std::string_view text) {
    const auto t = trim(text);
    for (const auto c : kAllChannels)
        if (channel_name(c) == t) return c;
    throw ConfigError("unknown feature channel '" + std::string(t) + "'");
}

std::vector<FeatureChannel> canonical_channels(std::vector<FeatureChannel> channels) {
    std::sort(channels.begin(), channels.end());
    channels.erase(std::unique(channels.begin(), channels.end()), channels.end());
    return channels;
}

std::string channel_set_label(const std::vector<FeatureChannel>& channels, std::string_view sep) {
    std::vector<std::string> names;
    for (const auto c : canonical_channels(channels)) names.emplace_back(channel_name(c));
    return join(names, sep);
}

} // namespace epc::dataset
