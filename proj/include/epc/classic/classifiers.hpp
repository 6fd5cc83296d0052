#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "epc/core/matrix.hpp"
#include "epc/dataset/labels.hpp"

namespace epc::classic {

using dataset::BinaryClass;

enum class ClassifierKind { Majority, Knn, Svm, LogReg };

std::string_view kind_name(ClassifierKind kind);
ClassifierKind parse_kind(std::string_view text);

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::Majority;
    std::size_t knn_k = 3;
    double svm_c = 1.0;                // inverse L2 strength
    std::size_t svm_max_iter = 10'000; // epochs
    bool class_weighted = false;
    std::uint64_t seed = 0;
    double sgd_learning_rate = 0.01;
    std::size_t sgd_epochs = 50;

    void validate() const;
};

struct TrainMetadata {
    std::uint64_t seed = 0;
    std::size_t iterations = 0;
    double final_objective = 0.0;
};

struct MajorityParams {
    BinaryClass majority = BinaryClass::Efficient;
};

struct KnnParams {
    std::size_t k = 3;
    Matrix points;
    std::vector<BinaryClass> labels;
};

// Linear score w.x + b; positive scores vote Inefficient.
struct LinearParams {
    std::vector<double> weights;
    double bias = 0.0;
};

class FittedClassifier {
public:
    using Params = std::variant<MajorityParams, KnnParams, LinearParams>;

    FittedClassifier(ClassifierConfig config, Params params, TrainMetadata metadata);

    ClassifierKind kind() const { return config_.kind; }
    const ClassifierConfig& config() const { return config_; }
    const Params& params() const { return params_; }
    const TrainMetadata& metadata() const { return metadata_; }

    // 0 for the majority model, which accepts any input.
    std::size_t input_dim() const;

    BinaryClass predict(std::span<const double> x) const;
    std::vector<BinaryClass> predict(const Matrix& x) const;

    // Linear models only.
    double decision_value(std::span<const double> x) const;

    // {P(efficient), P(inefficient)}; logistic regression only.
    std::array<double, 2> predict_scores(std::span<const double> x) const;

private:
    ClassifierConfig config_;
    Params params_;
    TrainMetadata metadata_;
};

// Most frequent class; a tie goes to Efficient.
FittedClassifier fit_majority(std::span<const BinaryClass> labels);

// Majority vote of the k Euclidean-nearest training rows; tied votes go to the nearest row's class.
FittedClassifier fit_knn(const Matrix& x, std::span<const BinaryClass> labels, std::size_t k = 3);

// Linear SVM trained in the primal by seeded stochastic subgradient descent on
//   (1/N) sum_i c_i max(0, 1 - y_i (w.x_i + b)) + ||w||^2 / (2 C N)
// for at most svm_max_iter epochs; c_i are inverse-frequency class weights when
// class_weighted, else 1. The epoch with the lowest objective is kept.
FittedClassifier fit_svm(const Matrix& x, std::span<const BinaryClass> labels, const ClassifierConfig& config);

// Logistic regression by seeded SGD on the unweighted mean log loss.
FittedClassifier fit_logreg(const Matrix& x, std::span<const BinaryClass> labels, const ClassifierConfig& config);

FittedClassifier fit_classifier(const Matrix& x, std::span<const BinaryClass> labels, const ClassifierConfig& config);

// JSON header (kind, config, metadata, and small parameters) plus an EMB1 blob
// "<stem>.params.emb" holding the training matrix (k-NN) or [w..., b] (linear).
void save_classifier(const FittedClassifier& model, const std::filesystem::path& json_path);
FittedClassifier load_classifier(const std::filesystem::path& json_path);

} // namespace epc::classic
