#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "epc/core/matrix.hpp"

namespace epc::cleaning {

struct ClusterModel {
    std::size_t k = 0;
    Matrix centroids;                      // k x D
    std::vector<std::size_t> assignments;  // one per input row
    double objective = 0.0;                // sum of squared distances to assigned centroids
    std::vector<double> objective_history; // objective after every assignment step
    std::uint64_t seed = 0;
    std::size_t iterations_run = 0;

    std::vector<std::size_t> members(std::size_t cluster) const;
};

// Lloyd's algorithm. Initial centroids are k distinct rows sampled with `seed`;
// iteration stops at an assignment fixpoint or after `max_iter` assignment
// steps. Distance ties go to the lowest cluster index. A cluster left empty by
// an update is re-seeded with the point farthest from its current centroid.
ClusterModel kmeans(const Matrix& points, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300);

// Sum of squared distances of every row to the centroid it is assigned to.
double kmeans_objective(const Matrix& points, const Matrix& centroids, const std::vector<std::size_t>& assignments);

// JSON {k, seed, objective, iterations_run, dim, centroids_file, assignments} with
// centroids in an EMB1 blob next to it (ids "c0".."c{k-1}").
void save_cluster_model(const ClusterModel& model, const std::vector<std::string>& ids,
                        const std::filesystem::path& json_path);
ClusterModel load_cluster_model(const std::filesystem::path& json_path, std::vector<std::string>* ids = nullptr);

} // namespace epc::cleaning
