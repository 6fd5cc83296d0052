#include "epc/cleaning/decisions.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "epc/core/text.hpp"

namespace epc::cleaning {

CleaningOutcome apply_cleaning_decisions(const std::vector<std::string>& ids, const ClusterModel& model,
                                         const std::vector<CleaningDecision>& decisions) {
    if (ids.size() != model.assignments.size())
        throw InvalidArgument("apply_cleaning_decisions: id count differs from cluster assignments");

    std::unordered_map<std::string, std::size_t> cluster_of;
    for (std::size_t i = 0; i < ids.size(); ++i) cluster_of[ids[i]] = model.assignments[i];

    std::map<std::size_t, Verdict> verdicts;
    std::unordered_map<std::string, Verdict> overrides;
    for (const auto& d : decisions) {
        if (d.cluster_id >= model.k)
            throw InvalidArgument("decision references unknown cluster " + std::to_string(d.cluster_id));
        if (!verdicts.emplace(d.cluster_id, d.verdict).second)
            throw InvalidArgument("cluster " + std::to_string(d.cluster_id) + " has more than one decision");
        for (const auto& o : d.overrides) {
            const auto it = cluster_of.find(o.id);
            if (it == cluster_of.end() || it->second != d.cluster_id)
                throw InvalidArgument("override '" + o.id + "' is not a member of cluster " +
                                      std::to_string(d.cluster_id));
            overrides[o.id] = o.verdict;
        }
    }

    CleaningOutcome out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto cluster = model.assignments[i];
        const auto v = verdicts.find(cluster);
        const Verdict cluster_verdict = v == verdicts.end() ? Verdict::Keep : v->second;
        const auto o = overrides.find(ids[i]);
        const Verdict final_verdict = o == overrides.end() ? cluster_verdict : o->second;
        if (final_verdict == Verdict::Keep) {
            out.kept.push_back(ids[i]);
        } else {
            const bool by_override = o != overrides.end() && cluster_verdict == Verdict::Keep;
            out.removed.push_back({ids[i], cluster,
                                   by_override ? "override drop in cluster " + std::to_string(cluster)
                                               : "cluster " + std::to_string(cluster) + " dropped"});
        }
    }
    return out;
}

dataset::Dataset remove_ids(const dataset::Dataset& dataset, const CleaningOutcome& outcome) {
    std::unordered_set<std::string> removed;
    for (const auto& r : outcome.removed) removed.insert(r.id);
    std::vector<std::string> keep;
    for (const auto& r : dataset.records())
        if (!removed.count(r.id)) keep.push_back(r.id);
    return dataset.filtered(keep);
}

std::vector<CleaningDecision> read_decisions(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || trim(lines.front()) != "cluster_id,verdict,override_ids")
        throw DataError(path.string() + ": expected header 'cluster_id,verdict,override_ids'");
    std::vector<CleaningDecision> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto where = path.string() + ":" + std::to_string(i + 1);
        auto f = split_csv_line(lines[i]);
        if (f.size() == 2) f.emplace_back();
        if (f.size() != 3) throw DataError(where + ": expected 3 fields");
        CleaningDecision d;
        const auto cluster = parse_int(f[0], "cluster_id");
        if (cluster < 0) throw DataError(where + ": negative cluster id");
        d.cluster_id = static_cast<std::size_t>(cluster);
        const auto verdict = trim(f[1]);
        if (verdict == "keep") d.verdict = Verdict::Keep;
        else if (verdict == "drop") d.verdict = Verdict::Drop;
        else throw DataError(where + ": verdict must be keep or drop");
        if (!trim(f[2]).empty()) {
            for (const auto& item : split(trim(f[2]), '|')) {
                const auto t = trim(item);
                if (t.size() < 2 || (t[0] != '+' && t[0] != '-'))
                    throw DataError(where + ": override '" + std::string(t) + "' needs a +/- prefix");
                d.overrides.push_back({std::string(t.substr(1)), t[0] == '+' ? Verdict::Keep : Verdict::Drop});
            }
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::string format_decisions(const std::vector<CleaningDecision>& decisions) {
    std::string out = "cluster_id,verdict,override_ids\n";
    for (const auto& d : decisions) {
        std::vector<std::string> items;
        for (const auto& o : d.overrides) items.push_back((o.verdict == Verdict::Keep ? "+" : "-") + o.id);
        out += std::to_string(d.cluster_id) + "," + (d.verdict == Verdict::Keep ? "keep" : "drop") + "," +
               csv_field(join(items, "|")) + "\n";
    }
    return out;
}

std::string decisions_template(const ClusterModel& model) {
    std::vector<CleaningDecision> decisions;
    for (std::size_t c = 0; c < model.k; ++c) decisions.push_back({c, Verdict::Keep, {}});
    return format_decisions(decisions);
}

std::string format_removal_report(const CleaningOutcome& outcome) {
    std::string out = "id,cluster,reason\n";
    for (const auto& r : outcome.removed)
        out += csv_field(r.id) + "," + std::to_string(r.cluster) + "," + csv_field(r.reason) + "\n";
    return out;
}

Montage export_cluster_montage(const ClusterModel& model, const Matrix& points,
                               const std::vector<std::optional<std::filesystem::path>>& image_paths,
                               std::size_t cluster_id, const MontageOptions& options) {
    if (cluster_id >= model.k) throw InvalidArgument("montage: unknown cluster " + std::to_string(cluster_id));
    if (options.rows < 1 || options.cols < 1 || options.tile_px < 1)
        throw InvalidArgument("montage: grid and tile size must be positive");
    if (image_paths.size() != points.rows()) throw InvalidArgument("montage: one image path per point required");

    auto members = model.members(cluster_id);
    if (members.empty()) throw InvalidArgument("montage: cluster " + std::to_string(cluster_id) + " is empty");
    std::vector<std::pair<double, std::size_t>> ranked;
    for (const auto i : members) ranked.push_back({squared_distance(points.row(i), model.centroids.row(cluster_id)), i});
    std::sort(ranked.begin(), ranked.end());

    const auto capacity = static_cast<std::size_t>(options.rows) * static_cast<std::size_t>(options.cols);
    Montage montage{Image(options.cols * options.tile_px, options.rows * options.tile_px, options.background), {}, {}};
    for (std::size_t t = 0; t < std::min(capacity, ranked.size()); ++t) {
        const auto row = ranked[t].second;
        montage.tiles.push_back(row);
        Image tile(options.tile_px, options.tile_px, options.missing_fill);
        if (const auto& path = image_paths[row]) {
            try {
                tile = resize_bilinear(load_image(*path), options.tile_px, options.tile_px);
            } catch (const DataError&) {
                montage.missing.push_back(path->string());
            }
        } else {
            montage.missing.push_back("<no image for row " + std::to_string(row) + ">");
        }
        const int ox = static_cast<int>(t % options.cols) * options.tile_px;
        const int oy = static_cast<int>(t / options.cols) * options.tile_px;
        for (int y = 0; y < options.tile_px; ++y)
            for (int x = 0; x < options.tile_px; ++x) montage.image.set(ox + x, oy + y, tile.at(x, y));
    }
    return montage;
}

} // namespace epc::cleaning
