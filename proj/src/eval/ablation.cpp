#include "epc/eval/ablation.hpp"

#include <algorithm>
#include <set>

#include "epc/classic/classifiers.hpp"

namespace epc::eval {

using dataset::FeatureChannel;
using C = FeatureChannel;

void AblationSpec::validate() const {
    if (feature_subsets.empty()) throw ConfigError("ablation: no feature subsets");
    if (head_kinds.empty()) throw ConfigError("ablation: no head kinds");
    std::set<std::vector<FeatureChannel>> seen;
    for (const auto& s : feature_subsets) {
        if (s.empty()) throw ConfigError("ablation: empty feature subset");
        if (!seen.insert(dataset::canonical_channels(s)).second)
            throw ConfigError("ablation: duplicate feature subset " + dataset::channel_set_label(s, ", "));
    }
    std::set<fusion::HeadKind> heads(head_kinds.begin(), head_kinds.end());
    if (heads.size() != head_kinds.size()) throw ConfigError("ablation: duplicate head kind");
    train.validate();
}

AblationSpec table4_ablation_spec() {
    AblationSpec spec;
    spec.feature_subsets = {
        {C::AV}, {C::SV}, {C::SegSV}, {C::EC}, {C::FP}, {C::LST},
        {C::SV, C::AV}, {C::AV, C::FP}, {C::AV, C::LST}, {C::SV, C::FP}, {C::SV, C::LST}, {C::LST, C::FP},
        {C::SV, C::AV, C::LST}, {C::SV, C::AV, C::FP}, {C::AV, C::LST, C::FP}, {C::SV, C::LST, C::FP},
        {C::SV, C::AV, C::LST, C::FP},
        {C::SV, C::AV, C::LST, C::FP, C::EC},
    };
    return spec;
}

nlohmann::ordered_json ablation_spec_to_json(const AblationSpec& spec) {
    nlohmann::ordered_json doc;
    auto subsets = nlohmann::ordered_json::array();
    for (const auto& s : spec.feature_subsets) {
        auto names = nlohmann::ordered_json::array();
        for (const auto c : s) names.push_back(std::string(dataset::channel_name(c)));
        subsets.push_back(names);
    }
    doc["feature_subsets"] = subsets;
    auto heads = nlohmann::ordered_json::array();
    for (const auto h : spec.head_kinds) heads.push_back(std::string(fusion::head_name(h)));
    doc["head_kinds"] = heads;
    doc["train"] = fusion::train_config_to_json(spec.train);
    doc["seed"] = spec.seed;
    return doc;
}

AblationSpec ablation_spec_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("ablation spec must be a JSON object");
    AblationSpec spec;
    bool have_subsets = false;
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "feature_subsets") {
                have_subsets = true;
                for (const auto& subset : value) {
                    std::vector<FeatureChannel> s;
                    for (const auto& name : subset) s.push_back(dataset::parse_channel(name.get<std::string>()));
                    spec.feature_subsets.push_back(std::move(s));
                }
            } else if (key == "preset") {
                if (value.get<std::string>() != "table4") throw ConfigError("unknown ablation preset");
                spec.feature_subsets = table4_ablation_spec().feature_subsets;
                have_subsets = true;
            } else if (key == "head_kinds") {
                spec.head_kinds.clear();
                for (const auto& h : value) spec.head_kinds.push_back(fusion::parse_head(h.get<std::string>()));
            } else if (key == "train") {
                spec.train = fusion::train_config_from_json(value, spec.train);
            } else if (key == "seed") {
                spec.seed = value.get<std::uint64_t>();
            } else {
                throw ConfigError("unknown ablation key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("ablation spec: ") + e.what());
    }
    if (!have_subsets) throw ConfigError("ablation spec needs feature_subsets or preset");
    spec.validate();
    return spec;
}

MetricReport majority_report(const dataset::Dataset& data, const dataset::DatasetSplit& split) {
    std::vector<BinaryClass> train_y;
    for (const auto& id : split.train) train_y.push_back(data.at(id).binary);
    if (train_y.empty()) throw DataError("majority model: empty train split");
    if (split.test.empty()) throw DataError("majority model: empty test split");
    const auto model = classic::fit_majority(train_y);
    std::vector<BinaryClass> y, pred;
    for (const auto& id : split.test) y.push_back(data.at(id).binary);
    pred.assign(y.size(), std::get<classic::MajorityParams>(model.params()).majority);
    return macro_metrics(confusion(y, pred));
}

MetricReport evaluate_head(const dataset::Dataset& data, const std::vector<std::string>& ids,
                           const fusion::TrainedHead& head) {
    const auto set = fusion::build_feature_set(data, ids, head.channels(), head.stats);
    if (set.x.cols() != head.params.input_dim())
        throw DataError("evaluate_head: feature dimension does not match the trained head");
    return macro_metrics(confusion(set.y, fusion::predict_all(head.params, set.x)));
}

AblationResult run_ablation(const dataset::Dataset& data, const dataset::DatasetSplit& split, const AblationSpec& spec) {
    spec.validate();
    AblationResult result;
    result.majority = majority_report(data, split);

    auto config = spec.train;
    config.seed = spec.seed;
    for (const auto head : spec.head_kinds) {
        std::vector<AblationRow> rows;
        for (const auto& subset : spec.feature_subsets) {
            const auto channels = dataset::canonical_channels(subset);
            const auto trained = fusion::train_head(data, split, channels, head, config);
            rows.push_back({channels, head, evaluate_head(data, split.test, trained)});
        }
        std::stable_sort(rows.begin(), rows.end(), [](const AblationRow& a, const AblationRow& b) {
            if (a.subset.size() != b.subset.size()) return a.subset.size() < b.subset.size();
            return a.report.f1_macro > b.report.f1_macro;
        });
        for (auto& r : rows) result.rows.push_back(std::move(r));
    }
    return result;
}

} // namespace epc::eval
