#include "epc/fusion/head.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

namespace epc::fusion {

namespace {

std::uint64_t next_version() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

std::size_t buffer_size(HeadKind kind, std::size_t d) {
    return kind == HeadKind::Linear ? kNumLogits * d + kNumLogits
                                    : kHiddenWidth * d + kHiddenWidth + kNumLogits * kHiddenWidth + kNumLogits;
}

} // namespace

std::string_view head_name(HeadKind kind) { return kind == HeadKind::Linear ? "linear" : "mlp"; }

HeadKind parse_head(std::string_view text) {
    if (text == "linear") return HeadKind::Linear;
    if (text == "mlp") return HeadKind::Mlp;
    throw ConfigError("unknown head kind '" + std::string(text) + "'");
}

HeadParameters::HeadParameters(HeadKind kind, std::size_t input_dim)
    : kind_(kind), input_dim_(input_dim), values_(buffer_size(kind, input_dim), 0.0), version_(next_version()) {
    if (input_dim == 0) throw InvalidArgument("head input dimension must be positive");
}

HeadParameters HeadParameters::initialize(HeadKind kind, std::size_t input_dim, Rng& rng) {
    HeadParameters p(kind, input_dim);
    for (std::size_t layer = 0; layer < p.num_layers(); ++layer) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(p.weight_shape(layer).second));
        for (auto& w : p.mutable_weight(layer)) w = rng.uniform(-bound, bound);
    }
    return p;
}

void HeadParameters::touch() { version_ = next_version(); }

std::span<double> HeadParameters::mutable_values() {
    touch();
    return values_;
}

std::pair<std::size_t, std::size_t> HeadParameters::weight_shape(std::size_t layer) const {
    if (layer >= num_layers()) throw InvalidArgument("head has no layer " + std::to_string(layer));
    if (kind_ == HeadKind::Linear) return {kNumLogits, input_dim_};
    return layer == 0 ? std::pair{kHiddenWidth, input_dim_} : std::pair{kNumLogits, kHiddenWidth};
}

std::size_t HeadParameters::offset_weight(std::size_t layer) const {
    if (layer == 0) return 0;
    return kHiddenWidth * input_dim_ + kHiddenWidth;
}

std::size_t HeadParameters::offset_bias(std::size_t layer) const {
    const auto [rows, cols] = weight_shape(layer);
    return offset_weight(layer) + rows * cols;
}

std::span<const double> HeadParameters::weight(std::size_t layer) const {
    const auto [rows, cols] = weight_shape(layer);
    return std::span<const double>(values_).subspan(offset_weight(layer), rows * cols);
}

std::span<const double> HeadParameters::bias(std::size_t layer) const {
    return std::span<const double>(values_).subspan(offset_bias(layer), weight_shape(layer).first);
}

std::span<double> HeadParameters::mutable_weight(std::size_t layer) {
    const auto [rows, cols] = weight_shape(layer);
    touch();
    return std::span<double>(values_).subspan(offset_weight(layer), rows * cols);
}

std::span<double> HeadParameters::mutable_bias(std::size_t layer) {
    const auto rows = weight_shape(layer).first;
    touch();
    return std::span<double>(values_).subspan(offset_bias(layer), rows);
}

namespace {

void affine(std::span<const double> w, std::span<const double> b, std::span<const double> x, std::span<double> out) {
    const std::size_t cols = x.size();
    for (std::size_t r = 0; r < out.size(); ++r) {
        const double* row = w.data() + r * cols;
        double sum = b[r];
        for (std::size_t j = 0; j < cols; ++j) sum += row[j] * x[j];
        out[r] = sum;
    }
}

void check_input(const HeadParameters& params, std::span<const double> x) {
    if (x.size() != params.input_dim())
        throw InvalidArgument("head expects input dimension " + std::to_string(params.input_dim()) + ", got " +
                              std::to_string(x.size()));
}

} // namespace

Logits forward_with_scale(const HeadParameters& params, std::span<const double> x,
                          std::span<const double> dropout_scale, ForwardCache& cache) {
    check_input(params, x);
    cache.params_version = params.version();
    cache.input.assign(x.begin(), x.end());
    if (params.kind() == HeadKind::Linear) {
        cache.hidden_pre.clear();
        cache.dropout_scale.clear();
        cache.hidden.clear();
        affine(params.weight(0), params.bias(0), x, cache.logits);
    } else {
        if (dropout_scale.size() != kHiddenWidth) throw InvalidArgument("dropout scale must have 8 entries");
        cache.hidden_pre.resize(kHiddenWidth);
        cache.hidden.resize(kHiddenWidth);
        cache.dropout_scale.assign(dropout_scale.begin(), dropout_scale.end());
        affine(params.weight(0), params.bias(0), x, cache.hidden_pre);
        for (std::size_t h = 0; h < kHiddenWidth; ++h)
            cache.hidden[h] = std::max(0.0, cache.hidden_pre[h]) * cache.dropout_scale[h];
        affine(params.weight(1), params.bias(1), cache.hidden, cache.logits);
    }
    cache.valid = true;
    return cache.logits;
}

Logits forward(const HeadParameters& params, std::span<const double> x, Mode mode, double dropout_p, Rng* rng,
               ForwardCache& cache) {
    if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw InvalidArgument("dropout_p must be in [0, 1)");
    std::array<double, kHiddenWidth> scale;
    scale.fill(1.0);
    if (params.kind() == HeadKind::Mlp && mode == Mode::Train && dropout_p > 0.0) {
        if (!rng) throw InvalidArgument("train-mode dropout needs an rng");
        const double keep_scale = 1.0 / (1.0 - dropout_p);
        for (auto& s : scale) s = rng->bernoulli(dropout_p) ? 0.0 : keep_scale;
    }
    const auto logits = forward_with_scale(params, x, scale, cache);
    cache.mode = mode;
    return logits;
}

Logits forward_eval(const HeadParameters& params, std::span<const double> x) {
    ForwardCache cache;
    return forward(params, x, Mode::Eval, 0.0, nullptr, cache);
}

void backward(const HeadParameters& params, const ForwardCache& cache, const Logits& dlogits,
              std::span<double> param_grads, std::span<double> input_grad) {
    if (!cache.valid || cache.params_version != params.version() || cache.input.size() != params.input_dim())
        throw StaleCacheError("forward cache does not belong to the current parameters");
    if (param_grads.size() != params.size()) throw InvalidArgument("gradient buffer size mismatch");
    if (!input_grad.empty() && input_grad.size() != params.input_dim())
        throw InvalidArgument("input gradient size mismatch");

    const std::size_t d = params.input_dim();
    const auto& x = cache.input;
    if (params.kind() == HeadKind::Linear) {
        const auto w = params.weight(0);
        for (std::size_t r = 0; r < kNumLogits; ++r) {
            double* gw = param_grads.data() + r * d;
            for (std::size_t j = 0; j < d; ++j) gw[j] += dlogits[r] * x[j];
            param_grads[kNumLogits * d + r] += dlogits[r];
        }
        if (!input_grad.empty())
            for (std::size_t j = 0; j < d; ++j) input_grad[j] = dlogits[0] * w[j] + dlogits[1] * w[d + j];
        return;
    }

    const auto w2 = params.weight(1);
    const std::size_t off_b1 = kHiddenWidth * d;
    const std::size_t off_w2 = off_b1 + kHiddenWidth;
    const std::size_t off_b2 = off_w2 + kNumLogits * kHiddenWidth;

    std::array<double, kHiddenWidth> dpre{};
    for (std::size_t r = 0; r < kNumLogits; ++r) {
        for (std::size_t h = 0; h < kHiddenWidth; ++h) param_grads[off_w2 + r * kHiddenWidth + h] += dlogits[r] * cache.hidden[h];
        param_grads[off_b2 + r] += dlogits[r];
    }
    for (std::size_t h = 0; h < kHiddenWidth; ++h) {
        const double dhidden = dlogits[0] * w2[h] + dlogits[1] * w2[kHiddenWidth + h];
        dpre[h] = cache.hidden_pre[h] > 0.0 ? dhidden * cache.dropout_scale[h] : 0.0;
    }
    for (std::size_t h = 0; h < kHiddenWidth; ++h) {
        if (dpre[h] == 0.0) continue;
        double* gw = param_grads.data() + h * d;
        for (std::size_t j = 0; j < d; ++j) gw[j] += dpre[h] * x[j];
        param_grads[off_b1 + h] += dpre[h];
    }
    if (!input_grad.empty()) {
        const auto w1 = params.weight(0);
        std::fill(input_grad.begin(), input_grad.end(), 0.0);
        for (std::size_t h = 0; h < kHiddenWidth; ++h) {
            if (dpre[h] == 0.0) continue;
            const double* row = w1.data() + h * d;
            for (std::size_t j = 0; j < d; ++j) input_grad[j] += dpre[h] * row[j];
        }
    }
}

LossAndGrad weighted_cross_entropy(const Logits& logits, dataset::BinaryClass label,
                                   const std::array<double, 2>& class_weights) {
    const int y = dataset::class_index(label);
    const double m = std::max(logits[0], logits[1]);
    const double lse = m + std::log(std::exp(logits[0] - m) + std::exp(logits[1] - m));
    const double w = class_weights[y];
    LossAndGrad out{w * (lse - logits[y]), {}};
    for (int c = 0; c < 2; ++c) out.grad[c] = w * (std::exp(logits[c] - lse) - (c == y ? 1.0 : 0.0));
    return out;
}

Prediction predict(const HeadParameters& params, std::span<const double> x) {
    const auto logits = forward_eval(params, x);
    return {logits[1] > logits[0] ? dataset::BinaryClass::Inefficient : dataset::BinaryClass::Efficient, logits};
}

} // namespace epc::fusion
