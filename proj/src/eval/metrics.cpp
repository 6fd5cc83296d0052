#include "epc/eval/metrics.hpp"

#include "epc/core/error.hpp"

namespace epc::eval {

ConfusionMatrix confusion(std::span<const BinaryClass> y_true, std::span<const BinaryClass> y_pred) {
    if (y_true.size() != y_pred.size()) throw InvalidArgument("confusion: label vectors differ in length");
    if (y_true.empty()) throw InvalidArgument("confusion: no labels");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < y_true.size(); ++i) ++cm.counts[dataset::class_index(y_true[i])][dataset::class_index(y_pred[i])];
    return cm;
}

MetricReport MetricReport::from_macro_percent(double precision, double recall, double f1) {
    MetricReport r;
    r.precision_macro = precision / 100.0;
    r.recall_macro = recall / 100.0;
    r.f1_macro = f1 / 100.0;
    return r;
}

MetricReport macro_metrics(const ConfusionMatrix& cm) {
    MetricReport report;
    report.matrix = cm;
    for (int c = 0; c < 2; ++c) {
        auto& s = report.per_class[c];
        const auto tp = cm.counts[c][c];
        const auto predicted = cm.counts[0][c] + cm.counts[1][c];
        const auto actual = cm.counts[c][0] + cm.counts[c][1];
        s.support = actual;
        s.precision_undefined = predicted == 0;
        s.recall_undefined = actual == 0;
        s.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
        s.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
        const double denom = s.precision + s.recall;
        s.f1 = denom > 0.0 ? 2.0 * s.precision * s.recall / denom : 0.0;
    }
    report.precision_macro = (report.per_class[0].precision + report.per_class[1].precision) / 2.0;
    report.recall_macro = (report.per_class[0].recall + report.per_class[1].recall) / 2.0;
    report.f1_macro = (report.per_class[0].f1 + report.per_class[1].f1) / 2.0;
    return report;
}

double delta_to_majority(const MetricReport& report, const MetricReport& majority) {
    return 100.0 * (report.f1_macro - majority.f1_macro);
}

} // namespace epc::eval
