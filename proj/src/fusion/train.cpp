#include "epc/fusion/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "epc/core/text.hpp"
#include "epc/dataset/embeddings.hpp"
#include "epc/eval/metrics.hpp"

namespace epc::fusion {

namespace {

enum Stream : std::uint64_t { kInitStream = 1, kShuffleStream = 2, kDropoutStream = 3 };

// Row permutation that orders `ids` lexicographically.
std::vector<std::size_t> id_order(const std::vector<std::string>& ids) {
    std::vector<std::size_t> order(ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
    for (std::size_t i = 1; i < order.size(); ++i)
        if (ids[order[i]] == ids[order[i - 1]]) throw DataError("train_head: duplicate id " + ids[order[i]]);
    return order;
}

void check_feature_set(const FeatureSet& set, const char* what) {
    if (set.x.rows() == 0) throw InvalidArgument(std::string("train_head: empty ") + what + " set");
    if (set.y.size() != set.x.rows() || set.ids.size() != set.x.rows())
        throw InvalidArgument(std::string("train_head: inconsistent ") + what + " set");
}

struct Evaluation {
    double loss;
    double f1;
};

// Sums in id order so the loss does not depend on storage order.
Evaluation evaluate(const HeadParameters& params, const FeatureSet& set, const std::vector<std::size_t>& order,
                    const std::array<double, 2>& weights) {
    double loss = 0.0;
    std::vector<BinaryClass> pred(set.x.rows());
    for (const auto r : order) {
        const auto p = predict(params, set.x.row(r));
        loss += weighted_cross_entropy(p.logits, set.y[r], weights).loss;
        pred[r] = p.label;
    }
    const auto report = eval::macro_metrics(eval::confusion(set.y, pred));
    return {loss / static_cast<double>(set.x.rows()), report.f1_macro};
}

std::vector<std::string> tensor_names(HeadKind kind) {
    if (kind == HeadKind::Linear) return {"W", "b"};
    return {"W1", "b1", "W2", "b2"};
}

} // namespace

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learning_rate must be positive");
    if (batch_size < 1) throw ConfigError("batch_size must be at least 1");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (!(dropout_p >= 0.0 && dropout_p < 1.0)) throw ConfigError("dropout_p must lie in [0, 1)");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
        throw ConfigError("adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("adam epsilon must be positive");
}

TrainedHead train_head(const FeatureSet& train, const FeatureSet& validation, HeadKind kind, const TrainConfig& config,
                       const ScalarStats& stats) {
    config.validate();
    check_feature_set(train, "train");
    check_feature_set(validation, "validation");
    const std::size_t dim = train.x.cols();
    if (validation.x.cols() != dim) throw InvalidArgument("train_head: train/validation dimension mismatch");

    std::array<double, 2> weights{1.0, 1.0};
    if (config.class_weighted) {
        try {
            weights = dataset::class_weights(train.y);
        } catch (const InvalidArgument&) {
            throw DataError("train_head: class weighting needs both classes in the train split");
        }
    }

    Rng init_rng(derive_seed(config.seed, kInitStream));
    Rng shuffle_rng(derive_seed(config.seed, kShuffleStream));
    Rng dropout_rng(derive_seed(config.seed, kDropoutStream));

    HeadParameters params = HeadParameters::initialize(kind, dim, init_rng);
    HeadParameters best = params;
    AdamState adam;
    const AdamConfig adam_config = config.adam();

    const auto base_order = id_order(train.ids);
    const auto validation_order = id_order(validation.ids);
    std::vector<std::size_t> order = base_order;
    std::vector<double> grads(params.size());
    ForwardCache cache;

    TrainHistory history;
    double best_f1 = -1.0;
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        order = base_order;
        shuffle_rng.shuffle(std::span<std::size_t>(order));

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
            const std::size_t end = std::min(order.size(), start + config.batch_size);
            const double n = static_cast<double>(end - start);
            std::fill(grads.begin(), grads.end(), 0.0);
            for (std::size_t i = start; i < end; ++i) {
                const std::size_t r = order[i];
                const auto logits = forward(params, train.x.row(r), Mode::Train, config.dropout_p, &dropout_rng, cache);
                auto lg = weighted_cross_entropy(logits, train.y[r], weights);
                epoch_loss += lg.loss;
                lg.grad[0] /= n;
                lg.grad[1] /= n;
                backward(params, cache, lg.grad, grads);
            }
            adam_step(params, grads, adam, adam_config);
        }

        const auto val = evaluate(params, validation, validation_order, weights);
        history.epochs.push_back({epoch, epoch_loss / static_cast<double>(order.size()), val.loss, val.f1});
        if (val.f1 > best_f1) {
            best_f1 = val.f1;
            best = params;
            history.best_epoch = epoch;
        }
    }
    history.rng_fingerprint = derive_seed(shuffle_rng.fingerprint(), dropout_rng.fingerprint());

    return TrainedHead{std::move(best), train.layout, stats, config, weights, std::move(history)};
}

TrainedHead train_head(const dataset::Dataset& data, const dataset::DatasetSplit& split,
                       const std::vector<FeatureChannel>& channels, HeadKind kind, const TrainConfig& config) {
    if (channels.empty()) throw InvalidArgument("train_head: no channels requested");
    const auto stats = compute_scalar_stats(data, split.train, channels);
    const auto train = build_feature_set(data, split.train, channels, stats);
    const auto validation = build_feature_set(data, split.validation, channels, stats);
    return train_head(train, validation, kind, config, stats);
}

std::vector<dataset::BinaryClass> predict_all(const HeadParameters& params, const Matrix& x) {
    std::vector<dataset::BinaryClass> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) out.push_back(predict(params, x.row(r)).label);
    return out;
}

void save_head(const TrainedHead& head, const std::filesystem::path& json_path) {
    nlohmann::ordered_json doc;
    doc["head_kind"] = head_name(head.params.kind());
    doc["input_dim"] = head.params.input_dim();
    auto channels = nlohmann::ordered_json::array();
    for (const auto& s : head.layout.slices)
        channels.push_back({{"channel", dataset::channel_name(s.channel)}, {"offset", s.offset}, {"length", s.length}});
    doc["channels"] = channels;
    doc["config"] = train_config_to_json(head.config);
    auto stats = nlohmann::ordered_json::object();
    for (const auto& [ch, st] : head.stats)
        stats[std::string(dataset::channel_name(ch))] = {{"mean", st.mean}, {"stddev", st.stddev}};
    doc["standardization"] = stats;
    doc["class_weights"] = head.class_weights;
    doc["best_epoch"] = head.history.best_epoch;

    auto tensors = nlohmann::ordered_json::array();
    const auto names = tensor_names(head.params.kind());
    for (std::size_t layer = 0; layer < head.params.num_layers(); ++layer) {
        const auto [rows, cols] = head.params.weight_shape(layer);
        const auto w = head.params.weight(layer);
        const auto b = head.params.bias(layer);
        const std::vector<float> wf(w.begin(), w.end());
        const std::vector<float> bf(b.begin(), b.end());
        auto wpath = json_path;
        wpath.replace_extension("." + names[2 * layer] + ".emb");
        auto bpath = json_path;
        bpath.replace_extension("." + names[2 * layer + 1] + ".emb");
        dataset::write_emb1_file(wpath, static_cast<std::uint32_t>(rows), static_cast<std::uint32_t>(cols), wf);
        dataset::write_emb1_file(bpath, 1, static_cast<std::uint32_t>(bf.size()), bf);
        tensors.push_back({{"name", names[2 * layer]}, {"file", wpath.filename().string()}});
        tensors.push_back({{"name", names[2 * layer + 1]}, {"file", bpath.filename().string()}});
    }
    doc["tensors"] = tensors;
    write_text_file(json_path, doc.dump(2) + "\n");
}

TrainedHead load_head(const std::filesystem::path& json_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(json_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(json_path.string() + ": " + e.what());
    }
    try {
        const auto kind = parse_head(doc.at("head_kind").get<std::string>());
        const std::size_t dim = doc.at("input_dim");

        std::vector<std::pair<FeatureChannel, std::size_t>> dims;
        for (const auto& c : doc.at("channels"))
            dims.emplace_back(dataset::parse_channel(c.at("channel").get<std::string>()), c.at("length").get<std::size_t>());
        auto layout = FusionLayout::from_dims(dims);
        if (layout.dim != dim) throw DataError(json_path.string() + ": channel layout does not match input_dim");

        const TrainConfig cfg = train_config_from_json(doc.at("config"));

        ScalarStats stats;
        for (const auto& [name, st] : doc.at("standardization").items())
            stats[dataset::parse_channel(name)] = {st.at("mean").get<double>(), st.at("stddev").get<double>()};

        HeadParameters params(kind, dim);
        const auto& tensors = doc.at("tensors");
        const auto names = tensor_names(kind);
        if (tensors.size() != names.size()) throw DataError(json_path.string() + ": wrong tensor count");
        for (std::size_t layer = 0; layer < params.num_layers(); ++layer) {
            const auto [rows, cols] = params.weight_shape(layer);
            const auto& wt = tensors.at(2 * layer);
            const auto& bt = tensors.at(2 * layer + 1);
            if (wt.at("name") != names[2 * layer] || bt.at("name") != names[2 * layer + 1])
                throw DataError(json_path.string() + ": unexpected tensor order");
            const auto w = dataset::read_emb1_file(json_path.parent_path() / wt.at("file").get<std::string>());
            const auto b = dataset::read_emb1_file(json_path.parent_path() / bt.at("file").get<std::string>());
            if (w.rows != rows || w.dim != cols) throw DataError(json_path.string() + ": weight shape mismatch");
            auto bias = params.mutable_bias(layer);
            if (b.values.size() != bias.size()) throw DataError(json_path.string() + ": bias shape mismatch");
            std::copy(w.values.begin(), w.values.end(), params.mutable_weight(layer).begin());
            std::copy(b.values.begin(), b.values.end(), bias.begin());
        }

        TrainedHead head{std::move(params), std::move(layout), std::move(stats), cfg, {1.0, 1.0}, {}};
        const auto& cw = doc.at("class_weights");
        head.class_weights = {cw.at(0).get<double>(), cw.at(1).get<double>()};
        head.history.best_epoch = doc.at("best_epoch");
        return head;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(json_path.string() + ": " + e.what());
    }
}

std::string format_history_csv(const TrainHistory& history) {
    std::string out = "epoch,train_loss,validation_loss,validation_f1,best\n";
    for (const auto& e : history.epochs) {
        out += std::to_string(e.epoch) + "," + format_exact(e.train_loss) + "," + format_exact(e.validation_loss) + "," +
               format_exact(e.validation_f1) + "," + (e.epoch == history.best_epoch ? "1" : "0") + "\n";
    }
    return out;
}

nlohmann::ordered_json train_config_to_json(const TrainConfig& c) {
    nlohmann::ordered_json doc;
    doc["learning_rate"] = c.learning_rate;
    doc["batch_size"] = c.batch_size;
    doc["epochs"] = c.epochs;
    doc["beta1"] = c.beta1;
    doc["beta2"] = c.beta2;
    doc["epsilon"] = c.epsilon;
    doc["dropout_p"] = c.dropout_p;
    doc["class_weighted"] = c.class_weighted;
    doc["seed"] = c.seed;
    return doc;
}

TrainConfig train_config_from_json(const nlohmann::json& doc, TrainConfig base) {
    if (!doc.is_object()) throw ConfigError("training config must be a JSON object");
    try {
        for (const auto& [key, value] : doc.items()) {
            if (key == "learning_rate") base.learning_rate = value.get<double>();
            else if (key == "batch_size") base.batch_size = value.get<std::size_t>();
            else if (key == "epochs") base.epochs = value.get<std::size_t>();
            else if (key == "beta1") base.beta1 = value.get<double>();
            else if (key == "beta2") base.beta2 = value.get<double>();
            else if (key == "epsilon") base.epsilon = value.get<double>();
            else if (key == "dropout_p") base.dropout_p = value.get<double>();
            else if (key == "class_weighted") base.class_weighted = value.get<bool>();
            else if (key == "seed") base.seed = value.get<std::uint64_t>();
            else throw ConfigError("unknown training key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("training config: ") + e.what());
    }
    return base;
}

} // namespace epc::fusion
