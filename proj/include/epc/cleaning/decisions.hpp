#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "epc/cleaning/kmeans.hpp"
#include "epc/core/image.hpp"
#include "epc/dataset/records.hpp"

namespace epc::cleaning {

enum class Verdict { Keep, Drop };

struct Override {
    std::string id;
    Verdict verdict;
};

// Human review outcome for one cluster. Overrides must name members of that cluster.
struct CleaningDecision {
    std::size_t cluster_id = 0;
    Verdict verdict = Verdict::Keep;
    std::vector<Override> overrides;
};

struct Removal {
    std::string id;
    std::size_t cluster;
    std::string reason;
};

struct CleaningOutcome {
    std::vector<std::string> kept;     // input order
    std::vector<Removal> removed;      // input order
};

// Members of drop clusters are removed unless overridden keep; members of keep
// clusters (or clusters without a decision) stay unless overridden drop.
// `ids[i]` is the id of the row assigned to model.assignments[i].
CleaningOutcome apply_cleaning_decisions(const std::vector<std::string>& ids, const ClusterModel& model,
                                         const std::vector<CleaningDecision>& decisions);

// Removes ids reported by `outcome` from `dataset`; records not covered by the
// clustering are kept.
dataset::Dataset remove_ids(const dataset::Dataset& dataset, const CleaningOutcome& outcome);

// CSV "cluster_id,verdict,override_ids"; overrides '|'-separated, '+id' keeps and '-id' drops.
std::vector<CleaningDecision> read_decisions(const std::filesystem::path& path);
std::string format_decisions(const std::vector<CleaningDecision>& decisions);

// One "keep" line per cluster, ready for manual editing.
std::string decisions_template(const ClusterModel& model);

std::string format_removal_report(const CleaningOutcome& outcome);

struct MontageOptions {
    int rows = 4;
    int cols = 4;
    int tile_px = 96;
    Rgb background = {32, 32, 32};
    Rgb missing_fill = {160, 0, 0};
};

struct Montage {
    Image image;
    std::vector<std::size_t> tiles;     // row indices in tile order
    std::vector<std::string> missing;   // image paths that could not be loaded
};

// Tiles up to rows*cols members of `cluster_id`, nearest to the centroid first.
// `image_paths[i]` is the image for point row i (empty optional = none).
Montage export_cluster_montage(const ClusterModel& model, const Matrix& points,
                               const std::vector<std::optional<std::filesystem::path>>& image_paths,
                               std::size_t cluster_id, const MontageOptions& options = {});

} // namespace epc::cleaning
