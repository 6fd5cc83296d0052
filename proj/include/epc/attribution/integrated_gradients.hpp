#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "epc/core/matrix.hpp"
#include "epc/fusion/features.hpp"
#include "epc/fusion/head.hpp"

namespace epc::attribution {

using dataset::FeatureChannel;

enum class BaselineKind { SeededRandom, Zeros, Explicit };

std::string_view baseline_name(BaselineKind kind);
BaselineKind parse_baseline(std::string_view text);

struct AttributionConfig {
    std::size_t steps = 50;
    BaselineKind baseline = BaselineKind::SeededRandom;
    std::uint64_t baseline_seed = 0;
    std::vector<double> explicit_baseline;  // used when baseline == Explicit

    void validate() const;
};

// Observed [min, max] of each input coordinate over the train split.
struct CoordinateRanges {
    std::vector<double> lo;
    std::vector<double> hi;

    static CoordinateRanges from_rows(const Matrix& x);
};

// zeros: 0-vector. seeded random: uniform within `ranges` per coordinate.
// explicit: the configured vector, which must have length `dim`.
std::vector<double> make_baseline(const AttributionConfig& config, std::size_t dim,
                                  const CoordinateRanges* ranges = nullptr);

using ChannelSums = std::map<FeatureChannel, double>;

struct AttributionResult {
    std::vector<double> attributions;
    double target_delta = 0.0;      // F(x) - F(x')
    double completeness_gap = 0.0;  // |sum(attr) - target_delta|
    ChannelSums channel_sums;
};

// F = logit(Efficient) - logit(Inefficient) under the eval-mode head.
double attribution_target(const fusion::HeadParameters& params, std::span<const double> x);

// Gradient of F with respect to the input.
std::vector<double> target_gradient(const fusion::HeadParameters& params, std::span<const double> x);

// Right Riemann sum of the path integral from `baseline` to `x` with `steps`
// points k/steps, k = 1..steps. Channel sums are filled when `layout` is given.
AttributionResult integrated_gradients(const fusion::HeadParameters& params, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t steps,
                                       const fusion::FusionLayout* layout = nullptr);

AttributionResult integrated_gradients(const fusion::HeadParameters& params, const fusion::FusionInput& x,
                                       std::span<const double> baseline, std::size_t steps);

// Sums attributions over each channel's index range.
ChannelSums channel_rollup(std::span<const double> attributions, const fusion::FusionLayout& layout);

struct AttributionRow {
    std::string id;
    AttributionResult result;
};

// CSV "id,channel,attribution_sum,target_delta,completeness_gap", one line per
// (record, channel) in input order and canonical channel order.
std::string format_attribution_csv(std::span<const AttributionRow> rows);

} // namespace epc::attribution
