#include "epc/fusion/adam.hpp"

#include <cmath>

namespace epc::fusion {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, const AdamConfig& config) {
    if (grads.size() != params.size()) throw InvalidArgument("adam_step: gradient size mismatch");
    if (state.m.empty() && state.step == 0) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    if (state.m.size() != params.size() || state.v.size() != params.size())
        throw InvalidArgument("adam_step: optimizer state size mismatch");
    for (const double g : grads)
        if (!std::isfinite(g)) throw InvalidArgument("adam_step: non-finite gradient");

    ++state.step;
    const double t = static_cast<double>(state.step);
    const double correction1 = 1.0 - std::pow(config.beta1, t);
    const double correction2 = 1.0 - std::pow(config.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = config.beta1 * state.m[i] + (1.0 - config.beta1) * grads[i];
        state.v[i] = config.beta2 * state.v[i] + (1.0 - config.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / correction1;
        const double v_hat = state.v[i] / correction2;
        params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
}

void adam_step(HeadParameters& params, std::span<const double> grads, AdamState& state, const AdamConfig& config) {
    adam_step(params.mutable_values(), grads, state, config);
}

} // namespace epc::fusion
