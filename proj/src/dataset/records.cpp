#include "epc/dataset/records.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <json.hpp>

#include "epc/core/text.hpp"

namespace epc::dataset {

namespace {

const std::vector<std::string> kManifestHeader = {"id", "geography", "x", "y", "label_units", "energy_consumption"};
const std::vector<std::string> kRecordsHeader = {"id",     "geography", "x",   "y",
                                                 "label_units", "label", "binary", "lst",
                                                 "footprint_area", "energy_consumption"};

std::vector<Grade> parse_units(std::string_view text, std::string_view where) {
    std::vector<Grade> units;
    for (const auto& part : split(text, '|')) {
        try {
            units.push_back(parse_grade(part));
        } catch (const DataError& e) {
            throw DataError(std::string(where) + ": " + e.what());
        }
    }
    return units;
}

std::string units_text(const std::vector<Grade>& units) {
    std::string out;
    for (std::size_t i = 0; i < units.size(); ++i) {
        if (i) out += '|';
        out += grade_letter(units[i]);
    }
    return out;
}

std::optional<double> optional_double(std::string_view text, std::string_view what) {
    if (trim(text).empty()) return std::nullopt;
    const double v = parse_double(text, what);
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

std::string optional_text(const std::optional<double>& v) { return v ? format_exact(*v) : std::string(); }

void check_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                  const std::filesystem::path& path) {
    std::vector<std::string> trimmed;
    for (const auto& f : got) trimmed.emplace_back(trim(f));
    if (trimmed != want) throw DataError(path.string() + ": expected header '" + join(want, ",") + "'");
}

std::vector<Point2> ring_from_json(const nlohmann::json& coords) {
    std::vector<Point2> ring;
    for (const auto& pt : coords) {
        if (!pt.is_array() || pt.size() < 2) throw DataError("GeoJSON position must be [x, y]");
        ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
    }
    return ring;
}

} // namespace

BuildingRecord make_record(std::string id, std::string geography, Point2 location, std::vector<Grade> unit_labels) {
    BuildingRecord r;
    r.id = std::move(id);
    r.geography = std::move(geography);
    r.centroid = location;
    r.label = aggregate_units(unit_labels);
    r.binary = binarize_label(r.label);
    r.unit_labels = std::move(unit_labels);
    return r;
}

Dataset::Dataset(std::vector<BuildingRecord> records) {
    for (auto& r : records) add_record(std::move(r));
}

void Dataset::add_record(BuildingRecord record) {
    if (record.id.empty()) throw DataError("record id must not be empty");
    if (!index_.emplace(record.id, records_.size()).second) throw DataError("duplicate record id '" + record.id + "'");
    if (record.footprint_area && !(*record.footprint_area > 0.0))
        throw DataError("record '" + record.id + "' has non-positive footprint area");
    records_.push_back(std::move(record));
}

void Dataset::attach_embeddings(FeatureChannel channel, EmbeddingMatrix matrix) {
    if (!is_embedding(channel)) throw InvalidArgument("channel " + std::string(channel_name(channel)) + " is scalar");
    matrix.set_channel(channel);
    for (auto& r : records_) {
        r.embedding_refs.erase(channel);
        if (const auto row = matrix.find(r.id)) r.embedding_refs[channel] = *row;
    }
    embeddings_[channel] = std::move(matrix);
}

const BuildingRecord* Dataset::find(const std::string& id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &records_[it->second];
}

const BuildingRecord& Dataset::at(const std::string& id) const {
    if (const auto* r = find(id)) return *r;
    throw DataError("unknown record id '" + id + "'");
}

bool Dataset::has_channel(const BuildingRecord& r, FeatureChannel c) const {
    switch (c) {
        case FeatureChannel::LST: return r.lst.has_value();
        case FeatureChannel::FP: return r.footprint_area.has_value();
        case FeatureChannel::EC: return r.energy_consumption.has_value();
        default: return r.embedding_refs.count(c) > 0 && embeddings_.count(c) > 0;
    }
}

std::size_t Dataset::channel_dim(FeatureChannel c) const {
    if (!is_embedding(c)) return 1;
    const auto it = embeddings_.find(c);
    if (it == embeddings_.end()) throw DataError("dataset has no " + std::string(channel_name(c)) + " embeddings");
    return it->second.dim();
}

double Dataset::scalar(const BuildingRecord& r, FeatureChannel c) const {
    std::optional<double> v;
    switch (c) {
        case FeatureChannel::LST: v = r.lst; break;
        case FeatureChannel::FP: v = r.footprint_area; break;
        case FeatureChannel::EC: v = r.energy_consumption; break;
        default: throw InvalidArgument("channel " + std::string(channel_name(c)) + " is not scalar");
    }
    if (!v) throw DataError("record '" + r.id + "' is missing channel " + std::string(channel_name(c)));
    return *v;
}

std::span<const float> Dataset::embedding(const BuildingRecord& r, FeatureChannel c) const {
    const auto ref = r.embedding_refs.find(c);
    const auto mat = embeddings_.find(c);
    if (ref == r.embedding_refs.end() || mat == embeddings_.end())
        throw DataError("record '" + r.id + "' is missing channel " + std::string(channel_name(c)));
    return mat->second.row(ref->second);
}

std::vector<std::string> Dataset::complete_ids(std::span<const FeatureChannel> channels) const {
    std::vector<std::string> ids;
    for (const auto& r : records_)
        if (std::all_of(channels.begin(), channels.end(), [&](FeatureChannel c) { return has_channel(r, c); }))
            ids.push_back(r.id);
    return ids;
}

Dataset Dataset::filtered(const std::vector<std::string>& keep) const {
    const std::unordered_set<std::string> wanted(keep.begin(), keep.end());
    Dataset out;
    for (const auto& r : records_) {
        if (!wanted.count(r.id)) continue;
        auto copy = r;
        copy.embedding_refs.clear();
        out.add_record(std::move(copy));
    }
    for (const auto& [channel, matrix] : embeddings_) {
        std::vector<std::string> ids;
        std::vector<float> data;
        for (const auto& r : records_) {
            const auto ref = r.embedding_refs.find(channel);
            if (!wanted.count(r.id) || ref == r.embedding_refs.end()) continue;
            ids.push_back(r.id);
            const auto row = matrix.row(ref->second);
            data.insert(data.end(), row.begin(), row.end());
        }
        out.attach_embeddings(channel, EmbeddingMatrix(std::move(ids), matrix.dim(), std::move(data), channel));
    }
    return out;
}

std::vector<BuildingRecord> read_manifest(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError(path.string() + ": empty manifest");
    check_header(split_csv_line(lines.front()), kManifestHeader, path);
    std::vector<BuildingRecord> records;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto where = path.string() + ":" + std::to_string(i + 1);
        const auto f = split_csv_line(lines[i]);
        if (f.size() != kManifestHeader.size()) throw DataError(where + ": expected 6 fields");
        const double x = parse_double(f[2], "x");
        const double y = parse_double(f[3], "y");
        if (!std::isfinite(x) || !std::isfinite(y)) throw DataError(where + ": coordinates must be finite");
        auto units = parse_units(f[4], where);
        auto record = make_record(std::string(trim(f[0])), std::string(trim(f[1])), {x, y}, std::move(units));
        record.energy_consumption = optional_double(f[5], "energy_consumption");
        records.push_back(std::move(record));
    }
    return records;
}

FootprintCollection parse_footprints_geojson(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid GeoJSON: ") + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection" || !doc.contains("features"))
        throw DataError("GeoJSON root must be a FeatureCollection");

    FootprintCollection out;
    std::unordered_set<std::string> seen;
    for (const auto& feature : doc["features"]) {
        try {
            const auto& props = feature.at("properties");
            const auto& idv = props.at("id");
            const std::string id = idv.is_string() ? idv.get<std::string>() : idv.dump();
            const auto& geom = feature.at("geometry");
            const auto type = geom.at("type").get<std::string>();
            std::optional<FootprintPolygon> polygon;
            if (type == "Polygon") {
                polygon.emplace(ring_from_json(geom.at("coordinates").at(0)));
            } else if (type == "MultiPolygon") {
                double best = -1.0;
                for (const auto& part : geom.at("coordinates")) {
                    FootprintPolygon candidate(ring_from_json(part.at(0)));
                    const double a = footprint_area(candidate);
                    if (a > best) {
                        best = a;
                        polygon.emplace(std::move(candidate));
                    }
                }
                if (geom.at("coordinates").size() > 1)
                    out.warnings.push_back("footprint '" + id + "': MultiPolygon reduced to its largest part");
            } else {
                throw DataError("unsupported geometry type " + type);
            }
            if (!polygon) throw DataError("empty geometry");
            if (!seen.insert(id).second) throw DataError("duplicate footprint id");
            out.footprints.push_back({id, std::move(*polygon)});
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string("malformed GeoJSON feature: ") + e.what());
        }
    }
    return out;
}

FootprintCollection read_footprints_geojson(const std::filesystem::path& path) {
    try {
        return parse_footprints_geojson(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::string csv = join(kRecordsHeader, ",") + "\n";
    for (const auto& r : dataset.records()) {
        const std::vector<std::string> fields = {
            csv_field(r.id), csv_field(r.geography), format_exact(r.centroid.x), format_exact(r.centroid.y),
            units_text(r.unit_labels), std::string(1, grade_letter(r.label)),
            std::to_string(class_index(r.binary)), optional_text(r.lst), optional_text(r.footprint_area),
            optional_text(r.energy_consumption)};
        csv += join(fields, ",") + "\n";
    }
    write_text_file(dir / "records.csv", csv);

    // Matrices are written compacted to the dataset's records, in record order.
    for (const auto c : kAllChannels) {
        if (!is_embedding(c)) continue;
        const auto path = dir / (std::string(channel_name(c)) + ".emb");
        if (!dataset.embeddings().count(c)) {
            std::filesystem::remove(path);
            std::filesystem::remove(ids_path_for(path));
            continue;
        }
        std::vector<std::string> ids;
        std::vector<float> data;
        for (const auto& r : dataset.records()) {
            if (!dataset.has_channel(r, c)) continue;
            ids.push_back(r.id);
            const auto row = dataset.embedding(r, c);
            data.insert(data.end(), row.begin(), row.end());
        }
        write_embeddings(EmbeddingMatrix(std::move(ids), dataset.channel_dim(c), std::move(data), c), path);
    }
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const auto path = dir / "records.csv";
    const auto lines = read_lines(path);
    if (lines.empty()) throw DataError(path.string() + ": empty records file");
    check_header(split_csv_line(lines.front()), kRecordsHeader, path);
    Dataset dataset;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto where = path.string() + ":" + std::to_string(i + 1);
        const auto f = split_csv_line(lines[i]);
        if (f.size() != kRecordsHeader.size()) throw DataError(where + ": expected 10 fields");
        auto record = make_record(f[0], f[1], {parse_double(f[2], "x"), parse_double(f[3], "y")},
                                  parse_units(f[4], where));
        if (parse_grade(f[5]) != record.label) throw DataError(where + ": label disagrees with label_units");
        if (parse_int(f[6], "binary") != class_index(record.binary))
            throw DataError(where + ": binary class disagrees with label");
        record.lst = optional_double(f[7], "lst");
        record.footprint_area = optional_double(f[8], "footprint_area");
        record.energy_consumption = optional_double(f[9], "energy_consumption");
        dataset.add_record(std::move(record));
    }
    for (const auto c : kAllChannels) {
        if (!is_embedding(c)) continue;
        const auto emb = dir / (std::string(channel_name(c)) + ".emb");
        if (std::filesystem::exists(emb)) dataset.attach_embeddings(c, read_embeddings(emb, c));
    }
    return dataset;
}

} // namespace epc::dataset
