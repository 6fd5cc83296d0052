#pragma once

#include <array>
#include <cstdint>
#include <span>

#include "epc/dataset/labels.hpp"

namespace epc::eval {

using dataset::BinaryClass;

// counts[true][predicted]
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, 2>, 2> counts{};

    std::uint64_t total() const { return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1]; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

ConfusionMatrix confusion(std::span<const BinaryClass> y_true, std::span<const BinaryClass> y_pred);

struct ClassScores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
    bool precision_undefined = false;  // no predictions of this class
    bool recall_undefined = false;     // no true members of this class
};

// Metrics are fractions in [0, 1]; rendering converts to percent.
struct MetricReport {
    std::array<ClassScores, 2> per_class{};
    double precision_macro = 0.0;
    double recall_macro = 0.0;
    double f1_macro = 0.0;
    ConfusionMatrix matrix{};

    // Report carrying only published macro values given in percent.
    static MetricReport from_macro_percent(double precision, double recall, double f1);
};

// Macro-averaged precision/recall/F1 over both classes. Undefined ratios
// contribute 0 and raise the matching flag.
MetricReport macro_metrics(const ConfusionMatrix& cm);

// Macro-F1 difference to the majority model, in percentage points.
double delta_to_majority(const MetricReport& report, const MetricReport& majority);

} // namespace epc::eval
