#include "epc/cleaning/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "epc/core/rng.hpp"
#include "epc/core/text.hpp"
#include "epc/dataset/embeddings.hpp"

namespace epc::cleaning {

std::vector<std::size_t> ClusterModel::members(std::size_t cluster) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < assignments.size(); ++i)
        if (assignments[i] == cluster) out.push_back(i);
    return out;
}

double kmeans_objective(const Matrix& points, const Matrix& centroids, const std::vector<std::size_t>& assignments) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) total += squared_distance(points.row(i), centroids.row(assignments[i]));
    return total;
}

namespace {

// Nearest centroid per row; returns the objective of the new assignment.
double assign(const Matrix& points, const Matrix& centroids, std::vector<std::size_t>& assignments) {
    double total = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double d = squared_distance(points.row(i), centroids.row(c));
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        assignments[i] = best;
        total += best_d;
    }
    return total;
}

void update(const Matrix& points, Matrix& centroids, std::vector<std::size_t>& assignments) {
    const std::size_t k = centroids.rows();
    const std::size_t dim = points.cols();
    Matrix sums(k, dim);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        auto s = sums.row(assignments[i]);
        const auto p = points.row(i);
        for (std::size_t j = 0; j < dim; ++j) s[j] += p[j];
        ++counts[assignments[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        auto dst = centroids.row(c);
        const auto s = sums.row(c);
        for (std::size_t j = 0; j < dim; ++j) dst[j] = s[j] / static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] != 0) continue;
        // Farthest point from its own centroid, taken only from clusters that can spare a member.
        std::size_t far = points.rows();
        double far_d = -1.0;
        for (std::size_t i = 0; i < points.rows(); ++i) {
            if (counts[assignments[i]] < 2) continue;
            const double d = squared_distance(points.row(i), centroids.row(assignments[i]));
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == points.rows()) continue;
        --counts[assignments[far]];
        assignments[far] = c;
        counts[c] = 1;
        std::copy(points.row(far).begin(), points.row(far).end(), centroids.row(c).begin());
    }
}

} // namespace

ClusterModel kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    if (k == 0) throw InvalidArgument("kmeans: k must be at least 1");
    if (k > points.rows()) throw InvalidArgument("kmeans: k exceeds the number of points");
    if (max_iter == 0) throw InvalidArgument("kmeans: max_iter must be at least 1");
    for (const double v : points.values())
        if (!std::isfinite(v)) throw InvalidArgument("kmeans: points must be finite");

    ClusterModel model;
    model.k = k;
    model.seed = seed;
    model.centroids = Matrix(k, points.cols());

    // Partial Fisher-Yates: the first k entries are k distinct rows.
    std::vector<std::size_t> order(points.rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.uniform_index(points.rows() - i));
        std::swap(order[i], order[j]);
        std::copy(points.row(order[i]).begin(), points.row(order[i]).end(), model.centroids.row(i).begin());
    }

    model.assignments.assign(points.rows(), 0);
    std::vector<std::size_t> previous;
    while (true) {
        model.objective = assign(points, model.centroids, model.assignments);
        model.objective_history.push_back(model.objective);
        ++model.iterations_run;
        if (model.assignments == previous || model.iterations_run >= max_iter) break;
        previous = model.assignments;
        update(points, model.centroids, model.assignments);
    }
    return model;
}

void save_cluster_model(const ClusterModel& model, const std::vector<std::string>& ids,
                        const std::filesystem::path& json_path) {
    auto blob = json_path;
    blob.replace_extension(".centroids.emb");
    std::vector<float> values(model.centroids.values().begin(), model.centroids.values().end());
    std::vector<std::string> names;
    for (std::size_t c = 0; c < model.k; ++c) names.push_back("c" + std::to_string(c));
    dataset::write_embeddings(dataset::EmbeddingMatrix(names, model.centroids.cols(), values), blob);

    nlohmann::ordered_json doc;
    doc["k"] = model.k;
    doc["seed"] = model.seed;
    doc["objective"] = model.objective;
    doc["iterations_run"] = model.iterations_run;
    doc["dim"] = model.centroids.cols();
    doc["centroids_file"] = blob.filename().string();
    nlohmann::ordered_json assignments = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < model.assignments.size(); ++i)
        assignments.push_back({{"id", i < ids.size() ? ids[i] : std::to_string(i)}, {"cluster", model.assignments[i]}});
    doc["assignments"] = std::move(assignments);
    write_text_file(json_path, doc.dump(2) + "\n");
}

ClusterModel load_cluster_model(const std::filesystem::path& json_path, std::vector<std::string>* ids) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text_file(json_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError(json_path.string() + ": " + e.what());
    }
    ClusterModel model;
    model.k = doc.at("k").get<std::size_t>();
    model.seed = doc.at("seed").get<std::uint64_t>();
    model.objective = doc.at("objective").get<double>();
    model.iterations_run = doc.at("iterations_run").get<std::size_t>();
    const auto centroids = dataset::read_embeddings(json_path.parent_path() / doc.at("centroids_file").get<std::string>());
    if (centroids.rows() != model.k) throw DataError(json_path.string() + ": centroid count differs from k");
    model.centroids = Matrix(model.k, centroids.dim(),
                             std::vector<double>(centroids.data().begin(), centroids.data().end()));
    for (const auto& a : doc.at("assignments")) {
        const auto cluster = a.at("cluster").get<std::size_t>();
        if (cluster >= model.k) throw DataError(json_path.string() + ": assignment outside [0, k)");
        model.assignments.push_back(cluster);
        if (ids) ids->push_back(a.at("id").get<std::string>());
    }
    return model;
}

} // namespace epc::cleaning
