#include "epc/eval/synth.hpp"

#include <cmath>
#include <cstdio>

#include "epc/core/rng.hpp"

namespace epc::eval {

namespace {

constexpr std::uint64_t kRecordStream = 1;
constexpr std::uint64_t kDirectionStream = 100;
constexpr double kGeographySpacing = 100000.0;  // metres between synthetic cities
constexpr double kCityExtent = 5000.0;

std::vector<double> unit_direction(std::size_t dim, Rng& rng) {
    std::vector<double> v(dim);
    double norm = 0.0;
    do {
        norm = 0.0;
        for (auto& x : v) {
            x = rng.normal();
            norm += x * x;
        }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& x : v) x /= norm;
    return v;
}

dataset::Grade draw_grade(dataset::BinaryClass c, Rng& rng) {
    // A-D for efficient, E-G for inefficient.
    if (c == dataset::BinaryClass::Efficient) return static_cast<dataset::Grade>(rng.uniform_index(4));
    return static_cast<dataset::Grade>(4 + rng.uniform_index(3));
}

dataset::FootprintPolygon square(dataset::Point2 centre, double area) {
    const double h = std::sqrt(area) / 2.0;
    return dataset::FootprintPolygon({{centre.x - h, centre.y - h},
                                      {centre.x + h, centre.y - h},
                                      {centre.x + h, centre.y + h},
                                      {centre.x - h, centre.y + h}});
}

} // namespace

std::size_t SynthConfig::total() const {
    std::size_t n = 0;
    for (const auto& g : geographies) n += g.count;
    return n;
}

double SynthConfig::signal_of(FeatureChannel c) const {
    const auto it = signal.find(c);
    return it == signal.end() ? 0.0 : it->second;
}

void SynthConfig::validate() const {
    if (geographies.empty()) throw ConfigError("synth: at least one geography is required");
    for (const auto& g : geographies) {
        if (g.name.empty()) throw ConfigError("synth: geography name must not be empty");
        if (g.count < 1) throw ConfigError("synth: geography '" + g.name + "' needs at least one record");
    }
    if (!(efficient_share > 0.0 && efficient_share < 1.0))
        throw ConfigError("synth: efficient_share must lie strictly between 0 and 1");
    if (embedding_dim < 1) throw ConfigError("synth: embedding_dim must be at least 1");
    for (const auto& [c, s] : signal)
        if (!std::isfinite(s) || s < 0.0)
            throw ConfigError("synth: signal for " + std::string(dataset::channel_name(c)) + " must be >= 0");
    if (!std::isfinite(noise) || noise < 0.0) throw ConfigError("synth: noise must be >= 0");
    if (!(multi_unit_share >= 0.0 && multi_unit_share <= 1.0))
        throw ConfigError("synth: multi_unit_share must lie in [0, 1]");
}

dataset::Dataset synth_generate(const SynthConfig& config) {
    config.validate();
    const std::size_t n = config.total();
    const std::size_t dim = config.embedding_dim;

    std::map<FeatureChannel, std::vector<double>> directions;
    for (const auto c : dataset::kAllChannels) {
        if (!dataset::is_embedding(c)) continue;
        Rng rng(derive_seed(config.seed, kDirectionStream + static_cast<std::uint64_t>(c)));
        directions[c] = unit_direction(dim, rng);
    }

    Rng rng(derive_seed(config.seed, kRecordStream));
    std::vector<dataset::BuildingRecord> records;
    std::map<FeatureChannel, std::vector<float>> emb;
    std::vector<std::string> ids;
    records.reserve(n);
    ids.reserve(n);
    for (const auto& [c, d] : directions) emb[c].reserve(n * dim);

    std::size_t serial = 0;
    for (std::size_t g = 0; g < config.geographies.size(); ++g) {
        const auto& geo = config.geographies[g];
        for (std::size_t i = 0; i < geo.count; ++i, ++serial) {
            char id[32];
            std::snprintf(id, sizeof id, "B%07zu", serial);

            const auto binary = rng.bernoulli(config.efficient_share) ? dataset::BinaryClass::Efficient
                                                                      : dataset::BinaryClass::Inefficient;
            const auto worst = draw_grade(binary, rng);
            std::vector<dataset::Grade> units{worst};
            if (rng.bernoulli(config.multi_unit_share)) {
                const std::size_t extra = 1 + rng.uniform_index(2);
                for (std::size_t u = 0; u < extra; ++u) {
                    // Other units are no worse than the worst one and keep the binary class.
                    const auto lo = binary == dataset::BinaryClass::Efficient ? 0u : 4u;
                    const auto hi = static_cast<unsigned>(worst);
                    units.push_back(static_cast<dataset::Grade>(lo + rng.uniform_index(hi - lo + 1)));
                }
            }

            const dataset::Point2 centre{static_cast<double>(g) * kGeographySpacing + rng.uniform(0.0, kCityExtent),
                                         rng.uniform(0.0, kCityExtent)};
            auto record = dataset::make_record(id, geo.name, centre, std::move(units));

            const double sign = binary == dataset::BinaryClass::Inefficient ? 1.0 : -1.0;
            auto latent = [&](FeatureChannel c) {
                return sign * config.signal_of(c) / 2.0 + config.noise * rng.normal();
            };
            for (const auto& [c, d] : directions) {
                const double z = sign * config.signal_of(c) / 2.0;
                auto& out = emb[c];
                for (std::size_t j = 0; j < dim; ++j)
                    out.push_back(static_cast<float>(z * d[j] + config.noise * rng.normal()));
            }
            record.lst = 8.0 + 2.0 * latent(FeatureChannel::LST);
            const double area = 100.0 * std::exp(0.25 * latent(FeatureChannel::FP));
            record.footprint = square(centre, area);
            record.footprint_area = dataset::footprint_area(*record.footprint);
            record.energy_consumption = 200.0 + 50.0 * latent(FeatureChannel::EC);

            ids.push_back(record.id);
            records.push_back(std::move(record));
        }
    }

    dataset::Dataset data(std::move(records));
    for (auto& [c, values] : emb) data.attach_embeddings(c, dataset::EmbeddingMatrix(ids, dim, std::move(values), c));
    return data;
}

nlohmann::ordered_json synth_config_to_json(const SynthConfig& c) {
    nlohmann::ordered_json doc;
    auto geos = nlohmann::ordered_json::array();
    for (const auto& g : c.geographies) geos.push_back({{"name", g.name}, {"count", g.count}});
    doc["geographies"] = geos;
    doc["efficient_share"] = c.efficient_share;
    doc["embedding_dim"] = c.embedding_dim;
    auto signal = nlohmann::ordered_json::object();
    for (const auto& [ch, s] : c.signal) signal[std::string(dataset::channel_name(ch))] = s;
    doc["signal"] = signal;
    doc["noise"] = c.noise;
    doc["multi_unit_share"] = c.multi_unit_share;
    doc["seed"] = c.seed;
    return doc;
}

SynthConfig synth_config_from_json(const nlohmann::json& doc, SynthConfig base) {
    if (!doc.is_object()) throw ConfigError("synth config must be a JSON object");
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "geographies") {
                base.geographies.clear();
                for (const auto& g : value)
                    base.geographies.push_back({g.at("name").get<std::string>(), g.at("count").get<std::size_t>()});
            } else if (key == "efficient_share") {
                base.efficient_share = value.get<double>();
            } else if (key == "embedding_dim") {
                base.embedding_dim = value.get<std::size_t>();
            } else if (key == "signal") {
                if (value.is_number()) {
                    for (auto& [ch, s] : base.signal) s = value.get<double>();
                } else {
                    for (const auto& [name, s] : value.items()) base.signal[dataset::parse_channel(name)] = s.get<double>();
                }
            } else if (key == "noise") {
                base.noise = value.get<double>();
            } else if (key == "multi_unit_share") {
                base.multi_unit_share = value.get<double>();
            } else if (key == "seed") {
                base.seed = value.get<std::uint64_t>();
            } else {
                throw ConfigError("unknown synth key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("synth config: ") + e.what());
    }
    return base;
}

} // namespace epc::eval
