#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "epc/dataset/records.hpp"

namespace epc::eval {

using dataset::FeatureChannel;

struct SynthGeography {
    std::string name;
    std::size_t count = 0;
};

// Desk-scale stand-in for the building corpus.
//
// Labels are Bernoulli(efficient_share). Each channel carries a latent
// z = +-signal/2 + N(0, noise^2) (plus for Inefficient). Embedding channels
// place z along a seeded unit direction and add isotropic N(0, noise^2)
// noise in every coordinate; LST, FP and EC are affine maps of z
// (FP through exp so areas stay positive).
struct SynthConfig {
    std::vector<SynthGeography> geographies = {{"Cambridge", 800}, {"Peterborough", 200}};
    double efficient_share = 0.7;
    std::size_t embedding_dim = 64;
    std::map<FeatureChannel, double> signal = {
        {FeatureChannel::SV, 1.0},  {FeatureChannel::AV, 1.0}, {FeatureChannel::SegSV, 1.0},
        {FeatureChannel::LST, 1.0}, {FeatureChannel::FP, 1.0}, {FeatureChannel::EC, 1.0}};
    double noise = 1.0;
    double multi_unit_share = 0.1;  // records with 2-3 units
    std::uint64_t seed = 0;

    std::size_t total() const;
    void validate() const;
    double signal_of(FeatureChannel c) const;
};

dataset::Dataset synth_generate(const SynthConfig& config);

nlohmann::ordered_json synth_config_to_json(const SynthConfig& config);
SynthConfig synth_config_from_json(const nlohmann::json& doc, SynthConfig base = {});

} // namespace epc::eval
