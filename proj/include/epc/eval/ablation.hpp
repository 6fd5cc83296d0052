#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "epc/dataset/split.hpp"
#include "epc/eval/metrics.hpp"
#include "epc/fusion/train.hpp"

namespace epc::eval {

using dataset::FeatureChannel;

struct AblationSpec {
    std::vector<std::vector<FeatureChannel>> feature_subsets;
    std::vector<fusion::HeadKind> head_kinds = {fusion::HeadKind::Linear, fusion::HeadKind::Mlp};
    fusion::TrainConfig train;
    std::uint64_t seed = 0;  // overrides train.seed for every run

    // Throws ConfigError on an empty or repeated subset (compared in canonical order).
    void validate() const;
};

// The end-to-end ablation grid: 6 singles, 6 pairs, 4 triples, 1 quadruple
// and the quintuple with energy consumption.
AblationSpec table4_ablation_spec();

nlohmann::ordered_json ablation_spec_to_json(const AblationSpec& spec);
AblationSpec ablation_spec_from_json(const nlohmann::json& doc);

struct AblationRow {
    std::vector<FeatureChannel> subset;  // canonical order
    fusion::HeadKind head;
    MetricReport report;
};

struct AblationResult {
    MetricReport majority;  // majority model fitted on train, scored on test
    std::vector<AblationRow> rows;
};

// Trains one head per (subset, head kind) on split.train with model
// selection on split.validation and scores it on split.test. Rows are grouped
// by head kind (spec order), then by subset size (ascending); within a group
// they are sorted by descending macro-F1 with spec order breaking ties.
AblationResult run_ablation(const dataset::Dataset& data, const dataset::DatasetSplit& split, const AblationSpec& spec);

// Majority model fitted on `split.train`, scored on `split.test`.
MetricReport majority_report(const dataset::Dataset& data, const dataset::DatasetSplit& split);

// Macro metrics of a trained head on `ids`.
MetricReport evaluate_head(const dataset::Dataset& data, const std::vector<std::string>& ids,
                           const fusion::TrainedHead& head);

} // namespace epc::eval
