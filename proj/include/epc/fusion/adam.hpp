#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "epc/fusion/head.hpp"

namespace epc::fusion {

struct AdamConfig {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::uint64_t step = 0;
    std::vector<double> m;
    std::vector<double> v;
};

// One bias-corrected Adam update. Moments are allocated on the first step.
// Throws InvalidArgument on a shape mismatch or non-finite gradient.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamConfig& config);
void adam_step(HeadParameters& params, std::span<const double> grads, AdamState& state, const AdamConfig& config);

} // namespace epc::fusion
