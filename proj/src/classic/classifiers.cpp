#include "epc/classic/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "epc/core/rng.hpp"
#include "epc/core/text.hpp"
#include "epc/dataset/embeddings.hpp"

namespace epc::classic {

using dataset::class_index;

std::string_view kind_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::Majority: return "majority";
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::Svm: return "svm";
        case ClassifierKind::LogReg: return "logreg";
    }
    return "?";
}

ClassifierKind parse_kind(std::string_view text) {
    for (const auto k : {ClassifierKind::Majority, ClassifierKind::Knn, ClassifierKind::Svm, ClassifierKind::LogReg})
        if (kind_name(k) == text) return k;
    throw ConfigError("unknown classifier kind '" + std::string(text) + "'");
}

void ClassifierConfig::validate() const {
    if (knn_k < 1) throw ConfigError("knn_k must be at least 1");
    if (!(svm_c > 0.0)) throw ConfigError("svm_c must be positive");
    if (svm_max_iter < 1) throw ConfigError("svm_max_iter must be at least 1");
    if (!(sgd_learning_rate > 0.0)) throw ConfigError("sgd_learning_rate must be positive");
}

FittedClassifier::FittedClassifier(ClassifierConfig config, Params params, TrainMetadata metadata)
    : config_(config), params_(std::move(params)), metadata_(metadata) {}

std::size_t FittedClassifier::input_dim() const {
    if (const auto* knn = std::get_if<KnnParams>(&params_)) return knn->points.cols();
    if (const auto* lin = std::get_if<LinearParams>(&params_)) return lin->weights.size();
    return 0;
}

double FittedClassifier::decision_value(std::span<const double> x) const {
    const auto* lin = std::get_if<LinearParams>(&params_);
    if (!lin) throw InvalidArgument("decision_value requires a linear model");
    if (x.size() != lin->weights.size()) throw InvalidArgument("input dimension does not match the model");
    return dot(lin->weights, x) + lin->bias;
}

std::array<double, 2> FittedClassifier::predict_scores(std::span<const double> x) const {
    if (config_.kind != ClassifierKind::LogReg) throw InvalidArgument("predict_scores requires logistic regression");
    const double z = decision_value(x);
    // Evaluate the sigmoid on the side where exp() cannot overflow.
    const double p1 = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
    return {1.0 - p1, p1};
}

BinaryClass FittedClassifier::predict(std::span<const double> x) const {
    if (const auto* m = std::get_if<MajorityParams>(&params_)) return m->majority;
    if (std::holds_alternative<LinearParams>(params_))
        return decision_value(x) > 0.0 ? BinaryClass::Inefficient : BinaryClass::Efficient;

    const auto& knn = std::get<KnnParams>(params_);
    if (x.size() != knn.points.cols()) throw InvalidArgument("input dimension does not match the model");
    std::vector<std::pair<double, std::size_t>> scored(knn.points.rows());
    for (std::size_t i = 0; i < knn.points.rows(); ++i) scored[i] = {squared_distance(x, knn.points.row(i)), i};
    const auto k = std::min(knn.k, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
    std::array<std::size_t, 2> votes{};
    for (std::size_t i = 0; i < k; ++i) ++votes[class_index(knn.labels[scored[i].second])];
    if (votes[0] == votes[1]) return knn.labels[scored[0].second];
    return votes[1] > votes[0] ? BinaryClass::Inefficient : BinaryClass::Efficient;
}

std::vector<BinaryClass> FittedClassifier::predict(const Matrix& x) const {
    std::vector<BinaryClass> out;
    out.reserve(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) out.push_back(predict(x.row(i)));
    return out;
}

namespace {

void check_training_data(const Matrix& x, std::span<const BinaryClass> labels, bool need_both) {
    if (x.rows() != labels.size()) throw InvalidArgument("feature rows and labels differ in count");
    if (x.rows() == 0) throw InvalidArgument("no training data");
    if (x.cols() == 0) throw InvalidArgument("zero-dimensional input");
    for (const double v : x.values())
        if (!std::isfinite(v)) throw InvalidArgument("features must be finite");
    if (need_both) {
        const bool has0 = std::find(labels.begin(), labels.end(), BinaryClass::Efficient) != labels.end();
        const bool has1 = std::find(labels.begin(), labels.end(), BinaryClass::Inefficient) != labels.end();
        if (!has0 || !has1) throw InvalidArgument("training labels must contain both classes");
    }
}

std::vector<std::size_t> iota_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

} // namespace

FittedClassifier fit_majority(std::span<const BinaryClass> labels) {
    if (labels.empty()) throw InvalidArgument("fit_majority: no labels");
    const auto n1 = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), BinaryClass::Inefficient));
    const auto n0 = labels.size() - n1;
    ClassifierConfig config;
    config.kind = ClassifierKind::Majority;
    return {config, MajorityParams{n1 > n0 ? BinaryClass::Inefficient : BinaryClass::Efficient},
            TrainMetadata{0, 1, 0.0}};
}

FittedClassifier fit_knn(const Matrix& x, std::span<const BinaryClass> labels, std::size_t k) {
    check_training_data(x, labels, false);
    if (k < 1 || k > x.rows()) throw InvalidArgument("fit_knn: k must be in [1, N]");
    ClassifierConfig config;
    config.kind = ClassifierKind::Knn;
    config.knn_k = k;
    return {config, KnnParams{k, x, std::vector<BinaryClass>(labels.begin(), labels.end())}, TrainMetadata{0, 0, 0.0}};
}

FittedClassifier fit_svm(const Matrix& x, std::span<const BinaryClass> labels, const ClassifierConfig& config) {
    config.validate();
    check_training_data(x, labels, true);
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    const double lambda = 1.0 / (config.svm_c * static_cast<double>(n));

    std::array<double, 2> cw = {1.0, 1.0};
    if (config.class_weighted) cw = dataset::class_weights(labels);

    std::vector<double> y(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = labels[i] == BinaryClass::Inefficient ? 1.0 : -1.0;
        c[i] = cw[class_index(labels[i])];
    }

    auto objective = [&](const std::vector<double>& w, double b) {
        double hinge = 0.0;
        for (std::size_t i = 0; i < n; ++i) hinge += c[i] * std::max(0.0, 1.0 - y[i] * (dot(w, x.row(i)) + b));
        return hinge / static_cast<double>(n) + 0.5 * lambda * dot(w, w);
    };

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    std::vector<double> best_w = w;
    double best_b = b;
    double best_obj = objective(w, b);
    std::size_t epochs_run = 0, stale = 0;
    constexpr std::size_t kPatience = 5;
    constexpr double kTol = 1e-4;

    Rng rng(config.seed);
    auto order = iota_indices(n);
    double t = 0.0;
    for (std::size_t epoch = 0; epoch < config.svm_max_iter; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (const auto i : order) {
            const double eta = config.sgd_learning_rate / (1.0 + config.sgd_learning_rate * lambda * t);
            const auto xi = x.row(i);
            const double margin = y[i] * (dot(w, xi) + b);
            const double shrink = 1.0 - eta * lambda;
            for (auto& wj : w) wj *= shrink;
            if (margin < 1.0) {
                const double step = eta * c[i] * y[i];
                for (std::size_t j = 0; j < d; ++j) w[j] += step * xi[j];
                b += step;
            }
            t += 1.0;
        }
        ++epochs_run;
        const double obj = objective(w, b);
        const bool significant = obj < best_obj - kTol * std::abs(best_obj);
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
        stale = significant ? 0 : stale + 1;
        if (stale >= kPatience) break;
    }

    auto cfg = config;
    cfg.kind = ClassifierKind::Svm;
    return {cfg, LinearParams{std::move(best_w), best_b}, TrainMetadata{config.seed, epochs_run, best_obj}};
}

FittedClassifier fit_logreg(const Matrix& x, std::span<const BinaryClass> labels, const ClassifierConfig& config) {
    config.validate();
    check_training_data(x, labels, true);
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    Rng rng(config.seed);
    auto order = iota_indices(n);
    for (std::size_t epoch = 0; epoch < config.sgd_epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (const auto i : order) {
            const auto xi = x.row(i);
            const double z = dot(w, xi) + b;
            const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
            const double g = p - (labels[i] == BinaryClass::Inefficient ? 1.0 : 0.0);
            const double step = config.sgd_learning_rate * g;
            for (std::size_t j = 0; j < d; ++j) w[j] -= step * xi[j];
            b -= step;
        }
    }

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = dot(w, x.row(i)) + b;
        const double signed_z = labels[i] == BinaryClass::Inefficient ? z : -z;
        loss += signed_z > 0 ? std::log1p(std::exp(-signed_z)) : -signed_z + std::log1p(std::exp(signed_z));
    }
    auto cfg = config;
    cfg.kind = ClassifierKind::LogReg;
    return {cfg, LinearParams{std::move(w), b}, TrainMetadata{config.seed, config.sgd_epochs, loss / n}};
}

FittedClassifier fit_classifier(const Matrix& x, std::span<const BinaryClass> labels, const ClassifierConfig& config) {
    switch (config.kind) {
        case ClassifierKind::Majority: return fit_majority(labels);
        case ClassifierKind::Knn: return fit_knn(x, labels, config.knn_k);
        case ClassifierKind::Svm: return fit_svm(x, labels, config);
        case ClassifierKind::LogReg: return fit_logreg(x, labels, config);
    }
    throw InvalidArgument("unknown classifier kind");
}

void save_classifier(const FittedClassifier& model, const std::filesystem::path& json_path) {
    const auto& cfg = model.config();
    nlohmann::ordered_json doc;
    doc["kind"] = kind_name(cfg.kind);
    doc["config"] = {{"knn_k", cfg.knn_k},
                     {"svm_c", cfg.svm_c},
                     {"svm_max_iter", cfg.svm_max_iter},
                     {"class_weighted", cfg.class_weighted},
                     {"seed", cfg.seed},
                     {"sgd_learning_rate", cfg.sgd_learning_rate},
                     {"sgd_epochs", cfg.sgd_epochs}};
    const auto& meta = model.metadata();
    doc["metadata"] = {{"seed", meta.seed}, {"iterations", meta.iterations}, {"final_objective", meta.final_objective}};

    auto blob = json_path;
    blob.replace_extension(".params.emb");
    if (const auto* m = std::get_if<MajorityParams>(&model.params())) {
        doc["majority_class"] = class_index(m->majority);
    } else if (const auto* knn = std::get_if<KnnParams>(&model.params())) {
        std::vector<float> values(knn->points.values().begin(), knn->points.values().end());
        dataset::write_emb1_file(blob, static_cast<std::uint32_t>(knn->points.rows()),
                                 static_cast<std::uint32_t>(knn->points.cols()), values);
        std::vector<int> labels;
        for (const auto l : knn->labels) labels.push_back(class_index(l));
        doc["labels"] = labels;
        doc["params_file"] = blob.filename().string();
    } else {
        const auto& lin = std::get<LinearParams>(model.params());
        std::vector<float> values(lin.weights.begin(), lin.weights.end());
        values.push_back(static_cast<float>(lin.bias));
        dataset::write_emb1_file(blob, 1, static_cast<std::uint32_t>(values.size()), values);
        doc["params_file"] = blob.filename().string();
    }
    write_text_file(json_path, doc.dump(2) + "\n");
}

FittedClassifier load_classifier(const std::filesystem::path& json_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(json_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(json_path.string() + ": " + e.what());
    }
    ClassifierConfig cfg;
    cfg.kind = parse_kind(doc.at("kind").get<std::string>());
    const auto& c = doc.at("config");
    cfg.knn_k = c.at("knn_k");
    cfg.svm_c = c.at("svm_c");
    cfg.svm_max_iter = c.at("svm_max_iter");
    cfg.class_weighted = c.at("class_weighted");
    cfg.seed = c.at("seed");
    cfg.sgd_learning_rate = c.at("sgd_learning_rate");
    cfg.sgd_epochs = c.at("sgd_epochs");
    const auto& m = doc.at("metadata");
    TrainMetadata meta{m.at("seed"), m.at("iterations"), m.at("final_objective")};

    if (cfg.kind == ClassifierKind::Majority)
        return {cfg, MajorityParams{dataset::class_from_index(doc.at("majority_class").get<int>())}, meta};

    const auto blob = dataset::read_emb1_file(json_path.parent_path() / doc.at("params_file").get<std::string>());
    std::vector<double> values(blob.values.begin(), blob.values.end());
    if (cfg.kind == ClassifierKind::Knn) {
        KnnParams p;
        p.k = cfg.knn_k;
        p.points = Matrix(blob.rows, blob.dim, std::move(values));
        for (const int l : doc.at("labels")) p.labels.push_back(dataset::class_from_index(l));
        if (p.labels.size() != p.points.rows()) throw DataError(json_path.string() + ": label count mismatch");
        return {cfg, std::move(p), meta};
    }
    if (values.empty()) throw DataError(json_path.string() + ": empty linear parameters");
    const double bias = values.back();
    values.pop_back();
    return {cfg, LinearParams{std::move(values), bias}, meta};
}

} // namespace epc::classic
