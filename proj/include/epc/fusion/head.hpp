#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "epc/core/error.hpp"
#include "epc/core/rng.hpp"
#include "epc/dataset/labels.hpp"

namespace epc::fusion {

enum class HeadKind { Linear, Mlp };

std::string_view head_name(HeadKind kind);
HeadKind parse_head(std::string_view text);

inline constexpr std::size_t kHiddenWidth = 8;
inline constexpr std::size_t kNumLogits = 2;

using Logits = std::array<double, kNumLogits>;

// Flat parameter buffer of a prediction head.
//   linear: W (2 x d, row-major), b (2)
//   mlp:    W1 (8 x d), b1 (8), W2 (2 x 8), b2 (2)
// Every mutable access stamps a fresh version so forward caches can be checked.
class HeadParameters {
public:
    HeadParameters(HeadKind kind, std::size_t input_dim);  // all zeros

    // Weights uniform in +-1/sqrt(fan_in), biases zero.
    static HeadParameters initialize(HeadKind kind, std::size_t input_dim, Rng& rng);

    HeadKind kind() const { return kind_; }
    std::size_t input_dim() const { return input_dim_; }
    std::size_t size() const { return values_.size(); }
    std::uint64_t version() const { return version_; }

    std::span<const double> values() const { return values_; }
    std::span<double> mutable_values();

    // Layer views: layer 0 is W/b (linear) or W1/b1 (mlp); layer 1 is W2/b2 (mlp only).
    std::span<const double> weight(std::size_t layer) const;
    std::span<const double> bias(std::size_t layer) const;
    std::span<double> mutable_weight(std::size_t layer);
    std::span<double> mutable_bias(std::size_t layer);
    std::size_t num_layers() const { return kind_ == HeadKind::Linear ? 1 : 2; }
    // (rows, cols) of the weight matrix of `layer`.
    std::pair<std::size_t, std::size_t> weight_shape(std::size_t layer) const;

    friend bool operator==(const HeadParameters& a, const HeadParameters& b) {
        return a.kind_ == b.kind_ && a.input_dim_ == b.input_dim_ && a.values_ == b.values_;
    }

private:
    std::size_t offset_weight(std::size_t layer) const;
    std::size_t offset_bias(std::size_t layer) const;
    void touch();

    HeadKind kind_;
    std::size_t input_dim_;
    std::vector<double> values_;
    std::uint64_t version_;
};

enum class Mode { Train, Eval };

// Activations retained for the backward pass.
struct ForwardCache {
    std::uint64_t params_version = 0;
    Mode mode = Mode::Eval;
    std::vector<double> input;
    std::vector<double> hidden_pre;     // W1 x + b1 (mlp)
    std::vector<double> dropout_scale;  // 0 or 1/(1-p) per hidden unit; 1 in eval mode
    std::vector<double> hidden;         // relu(hidden_pre) * dropout_scale
    Logits logits{};
    bool valid = false;
};

class StaleCacheError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

// linear: W x + b; mlp: W2 (drop(relu(W1 x + b1))) + b2. Inverted dropout with
// rate `dropout_p` is applied to the hidden layer in train mode only, drawing
// the mask from `rng`.
Logits forward(const HeadParameters& params, std::span<const double> x, Mode mode, double dropout_p, Rng* rng,
               ForwardCache& cache);
Logits forward_eval(const HeadParameters& params, std::span<const double> x);

// mlp forward with an explicit per-hidden-unit dropout scale.
Logits forward_with_scale(const HeadParameters& params, std::span<const double> x,
                          std::span<const double> dropout_scale, ForwardCache& cache);

// Adds d(loss)/d(params) for `dlogits` into `param_grads` (same layout as the
// parameter buffer) and, if non-empty, writes d(loss)/d(input) into `input_grad`.
// Throws StaleCacheError when the cache does not belong to the current parameters.
void backward(const HeadParameters& params, const ForwardCache& cache, const Logits& dlogits,
              std::span<double> param_grads, std::span<double> input_grad = {});

struct LossAndGrad {
    double loss;
    Logits grad;  // d loss / d logits
};

// w_label * -log softmax(logits)[label], evaluated via log-sum-exp.
LossAndGrad weighted_cross_entropy(const Logits& logits, dataset::BinaryClass label,
                                   const std::array<double, 2>& class_weights);

struct Prediction {
    dataset::BinaryClass label;
    Logits logits;
};

// Eval-mode argmax; equal logits predict Efficient.
Prediction predict(const HeadParameters& params, std::span<const double> x);

} // namespace epc::fusion
