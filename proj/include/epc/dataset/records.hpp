#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "epc/dataset/channel.hpp"
#include "epc/dataset/embeddings.hpp"
#include "epc/dataset/geometry.hpp"
#include "epc/dataset/labels.hpp"

namespace epc::dataset {

struct BuildingRecord {
    std::string id;
    Point2 centroid;
    std::optional<FootprintPolygon> footprint;
    std::string geography;
    std::vector<Grade> unit_labels;
    Grade label = Grade::A;
    BinaryClass binary = BinaryClass::Efficient;
    std::optional<double> lst;
    std::optional<double> footprint_area;
    std::optional<double> energy_consumption;
    std::map<FeatureChannel, std::size_t> embedding_refs;  // channel -> row in that channel's matrix
};

// Record with the aggregated and binarized label derived from `unit_labels`.
BuildingRecord make_record(std::string id, std::string geography, Point2 location, std::vector<Grade> unit_labels);

// Records plus the embedding matrices their refs point into.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<BuildingRecord> records);

    const std::vector<BuildingRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }

    void add_record(BuildingRecord record);
    BuildingRecord& record(std::size_t i) { return records_[i]; }

    // Attaches `matrix` as `channel` and points every record with a matching id at its row.
    void attach_embeddings(FeatureChannel channel, EmbeddingMatrix matrix);
    const std::map<FeatureChannel, EmbeddingMatrix>& embeddings() const { return embeddings_; }

    const BuildingRecord* find(const std::string& id) const;
    const BuildingRecord& at(const std::string& id) const;

    bool has_channel(const BuildingRecord& r, FeatureChannel c) const;
    std::size_t channel_dim(FeatureChannel c) const;
    double scalar(const BuildingRecord& r, FeatureChannel c) const;
    std::span<const float> embedding(const BuildingRecord& r, FeatureChannel c) const;

    // Ids of records carrying every channel in `channels`.
    std::vector<std::string> complete_ids(std::span<const FeatureChannel> channels) const;

    // Copy restricted to records whose id is in `keep`; embedding matrices are compacted.
    Dataset filtered(const std::vector<std::string>& keep) const;

private:
    std::vector<BuildingRecord> records_;
    std::unordered_map<std::string, std::size_t> index_;
    std::map<FeatureChannel, EmbeddingMatrix> embeddings_;
};

// Records manifest: header "id,geography,x,y,label_units,energy_consumption";
// label_units is '|'-separated grades, energy_consumption may be empty.
std::vector<BuildingRecord> read_manifest(const std::filesystem::path& path);

struct FootprintCollection {
    std::vector<Footprint> footprints;
    std::vector<std::string> warnings;
};

// GeoJSON FeatureCollection with an "id" property per feature. Polygon outer
// rings are used; holes are ignored and a MultiPolygon contributes its largest part.
FootprintCollection read_footprints_geojson(const std::filesystem::path& path);
FootprintCollection parse_footprints_geojson(std::string_view text);

// Normalised dataset directory: records.csv plus "<CHANNEL>.emb" (+ .ids.csv) per embedding channel.
void save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

} // namespace epc::dataset
