#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epc/eval/ablation.hpp"
#include "epc/eval/metrics.hpp"

namespace epc::eval {

struct ReportRow {
    std::string group;
    std::string features;
    std::string head;
    MetricReport report;
    std::optional<double> delta_f1_ppt;  // blank when absent
};

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_report_format(std::string_view text);

// Percentages and deltas rounded to 2 decimals at this point only. CSV columns
// are group,features,head,precision_macro,recall_macro,f1_macro,delta_f1_ppt.
// Throws InvalidArgument on an empty row list.
std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format);

// Signed 2-decimal rendering of a delta, e.g. "+7.84", "-0.50", "0.00".
std::string format_delta(double ppt);

// Majority row followed by one row per ablation result (group = subset size,
// delta against the majority model).
std::vector<ReportRow> ablation_report_rows(const AblationResult& result);

} // namespace epc::eval
