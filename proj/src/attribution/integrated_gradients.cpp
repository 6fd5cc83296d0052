#include "epc/attribution/integrated_gradients.hpp"

#include <cmath>

#include "epc/core/rng.hpp"
#include "epc/core/text.hpp"

namespace epc::attribution {

std::string_view baseline_name(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::SeededRandom: return "random";
        case BaselineKind::Zeros: return "zeros";
        case BaselineKind::Explicit: return "explicit";
    }
    return "?";
}

BaselineKind parse_baseline(std::string_view text) {
    if (text == "random" || text == "seeded-random") return BaselineKind::SeededRandom;
    if (text == "zeros") return BaselineKind::Zeros;
    if (text == "explicit") return BaselineKind::Explicit;
    throw ConfigError("unknown baseline '" + std::string(text) + "' (expected random, zeros or explicit)");
}

void AttributionConfig::validate() const {
    if (steps < 1) throw ConfigError("attribution steps must be at least 1");
    if (baseline == BaselineKind::Explicit && explicit_baseline.empty())
        throw ConfigError("explicit baseline requested without a vector");
}

CoordinateRanges CoordinateRanges::from_rows(const Matrix& x) {
    if (x.rows() == 0) throw InvalidArgument("coordinate ranges need at least one row");
    CoordinateRanges r;
    const auto first = x.row(0);
    r.lo.assign(first.begin(), first.end());
    r.hi = r.lo;
    for (std::size_t i = 1; i < x.rows(); ++i) {
        const auto row = x.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            r.lo[j] = std::min(r.lo[j], row[j]);
            r.hi[j] = std::max(r.hi[j], row[j]);
        }
    }
    return r;
}

std::vector<double> make_baseline(const AttributionConfig& config, std::size_t dim, const CoordinateRanges* ranges) {
    if (dim < 1) throw InvalidArgument("make_baseline: dim must be at least 1");
    switch (config.baseline) {
        case BaselineKind::Zeros: return std::vector<double>(dim, 0.0);
        case BaselineKind::Explicit:
            if (config.explicit_baseline.size() != dim)
                throw InvalidArgument("make_baseline: explicit baseline has length " +
                                      std::to_string(config.explicit_baseline.size()) + ", expected " +
                                      std::to_string(dim));
            return config.explicit_baseline;
        case BaselineKind::SeededRandom: break;
    }
    if (ranges == nullptr || ranges->lo.size() != dim || ranges->hi.size() != dim)
        throw InvalidArgument("make_baseline: random baseline needs train ranges of matching length");
    Rng rng(config.baseline_seed);
    std::vector<double> out(dim);
    for (std::size_t j = 0; j < dim; ++j) out[j] = rng.uniform(ranges->lo[j], ranges->hi[j]);
    return out;
}

double attribution_target(const fusion::HeadParameters& params, std::span<const double> x) {
    const auto logits = fusion::forward_eval(params, x);
    return logits[0] - logits[1];
}

std::vector<double> target_gradient(const fusion::HeadParameters& params, std::span<const double> x) {
    fusion::ForwardCache cache;
    fusion::forward(params, x, fusion::Mode::Eval, 0.0, nullptr, cache);
    std::vector<double> param_grads(params.size());
    std::vector<double> grad(x.size());
    fusion::backward(params, cache, {1.0, -1.0}, param_grads, grad);
    return grad;
}

AttributionResult integrated_gradients(const fusion::HeadParameters& params, std::span<const double> x,
                                       std::span<const double> baseline, std::size_t steps,
                                       const fusion::FusionLayout* layout) {
    if (steps < 1) throw InvalidArgument("integrated_gradients: steps must be at least 1");
    if (x.size() != baseline.size())
        throw InvalidArgument("integrated_gradients: input and baseline dimensions differ");
    if (x.size() != params.input_dim())
        throw InvalidArgument("integrated_gradients: input dimension does not match the head");

    const std::size_t d = x.size();
    std::vector<double> grad_sum(d, 0.0);
    std::vector<double> point(d);
    for (std::size_t k = 1; k <= steps; ++k) {
        const double alpha = static_cast<double>(k) / static_cast<double>(steps);
        for (std::size_t j = 0; j < d; ++j) point[j] = baseline[j] + alpha * (x[j] - baseline[j]);
        const auto g = target_gradient(params, point);
        for (std::size_t j = 0; j < d; ++j) grad_sum[j] += g[j];
    }

    AttributionResult result;
    result.attributions.resize(d);
    double total = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        // A coordinate with no path length gets exactly zero.
        const double diff = x[j] - baseline[j];
        result.attributions[j] = diff == 0.0 ? 0.0 : diff * (grad_sum[j] / static_cast<double>(steps));
        total += result.attributions[j];
    }
    result.target_delta = attribution_target(params, x) - attribution_target(params, baseline);
    result.completeness_gap = std::abs(total - result.target_delta);
    if (layout != nullptr) result.channel_sums = channel_rollup(result.attributions, *layout);
    return result;
}

AttributionResult integrated_gradients(const fusion::HeadParameters& params, const fusion::FusionInput& x,
                                       std::span<const double> baseline, std::size_t steps) {
    return integrated_gradients(params, x.vector, baseline, steps, &x.layout);
}

ChannelSums channel_rollup(std::span<const double> attributions, const fusion::FusionLayout& layout) {
    if (attributions.size() != layout.dim)
        throw InvalidArgument("channel_rollup: attribution length does not match the layout");
    ChannelSums sums;
    for (const auto& s : layout.slices) {
        double acc = 0.0;
        for (std::size_t j = s.offset; j < s.offset + s.length; ++j) acc += attributions[j];
        sums[s.channel] = acc;
    }
    return sums;
}

std::string format_attribution_csv(std::span<const AttributionRow> rows) {
    std::string out = "id,channel,attribution_sum,target_delta,completeness_gap\n";
    for (const auto& row : rows) {
        for (const auto& [channel, sum] : row.result.channel_sums) {
            out += csv_field(row.id) + "," + std::string(dataset::channel_name(channel)) + "," + format_exact(sum) + "," +
                   format_exact(row.result.target_delta) + "," + format_exact(row.result.completeness_gap) + "\n";
        }
    }
    return out;
}

} // namespace epc::attribution
