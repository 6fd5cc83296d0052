#include "epc/eval/report.hpp"

#include "epc/core/text.hpp"

namespace epc::eval {

ReportFormat parse_report_format(std::string_view text) {
    if (text == "csv") return ReportFormat::Csv;
    if (text == "markdown" || text == "md") return ReportFormat::Markdown;
    throw ConfigError("unknown report format '" + std::string(text) + "' (expected csv or markdown)");
}

std::string format_delta(double ppt) {
    const auto text = format_fixed(ppt, 2);
    if (text == "0.00" || text.front() == '-') return text;
    return "+" + text;
}

namespace {

std::string percent(double fraction) { return format_fixed(100.0 * fraction, 2); }

std::string delta_text(const ReportRow& row) { return row.delta_f1_ppt ? format_delta(*row.delta_f1_ppt) : ""; }

std::string markdown_cell(const std::string& text) {
    std::string out;
    for (const char c : text) {
        if (c == '|') out += '\\';
        out += c;
    }
    return out;
}

} // namespace

std::string render_report(const std::vector<ReportRow>& rows, ReportFormat format) {
    if (rows.empty()) throw InvalidArgument("render_report: no rows");
    std::string out;
    if (format == ReportFormat::Csv) {
        out = "group,features,head,precision_macro,recall_macro,f1_macro,delta_f1_ppt\n";
        for (const auto& r : rows) {
            out += csv_field(r.group) + "," + csv_field(r.features) + "," + csv_field(r.head) + "," +
                   percent(r.report.precision_macro) + "," + percent(r.report.recall_macro) + "," +
                   percent(r.report.f1_macro) + "," + delta_text(r) + "\n";
        }
        return out;
    }
    out = "| Group | Features | Head | Precision [%] | Recall [%] | F1 [%] | dF1 to MM [ppt] |\n";
    out += "|---|---|---|---:|---:|---:|---:|\n";
    for (const auto& r : rows) {
        out += "| " + markdown_cell(r.group) + " | " + markdown_cell(r.features) + " | " + markdown_cell(r.head) +
               " | " + percent(r.report.precision_macro) + " | " + percent(r.report.recall_macro) + " | " +
               percent(r.report.f1_macro) + " | " + delta_text(r) + " |\n";
    }
    return out;
}

std::vector<ReportRow> ablation_report_rows(const AblationResult& result) {
    std::vector<ReportRow> rows;
    rows.push_back({"baseline", "majority", "majority", result.majority, std::nullopt});
    for (const auto& r : result.rows) {
        rows.push_back({std::to_string(r.subset.size()), dataset::channel_set_label(r.subset, "+"),
                        std::string(fusion::head_name(r.head)), r.report, delta_to_majority(r.report, result.majority)});
    }
    return rows;
}

} // namespace epc::eval
