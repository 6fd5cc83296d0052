#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace epc::dataset {

// Feature sources. Enumerator order is the canonical concatenation order.
enum class FeatureChannel : std::uint8_t { SV, AV, SegSV, LST, FP, EC };

inline constexpr std::array<FeatureChannel, 6> kAllChannels = {
    FeatureChannel::SV, FeatureChannel::AV, FeatureChannel::SegSV,
    FeatureChannel::LST, FeatureChannel::FP, FeatureChannel::EC};

// SV, AV and SegSV are image embeddings; the rest are scalars.
inline constexpr bool is_embedding(FeatureChannel c) { return c <= FeatureChannel::SegSV; }

std::string_view channel_name(FeatureChannel c);
FeatureChannel parse_channel(std::string_view text);

// Sorted, de-duplicated copy in canonical order.
std::vector<FeatureChannel> canonical_channels(std::vector<FeatureChannel> channels);

// "SV+AV+LST" style label in canonical order.
std::string channel_set_label(const std::vector<FeatureChannel>& channels, std::string_view sep = "+");

} // namespace epc::dataset
