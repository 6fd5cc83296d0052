#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epc/dataset/records.hpp"

namespace epc::dataset {

enum class Partition { Train, Validation, Test };

struct DatasetSplit {
    std::vector<std::string> train;  // each list sorted by id
    std::vector<std::string> validation;
    std::vector<std::string> test;
    std::optional<std::string> holdout_geography;

    std::size_t size() const { return train.size() + validation.size() + test.size(); }
    const std::vector<std::string>& ids(Partition p) const;
};

// Either explicit counts (train, validation, test) or fractions summing to 1.
//
// With a holdout geography, every record of that geography forms the test set;
// the remaining records are shuffled by `seed` and cut into train/validation
// (counts must then match the holdout size for test, and fractions are
// renormalised over train+validation). Without a holdout, all records are
// shuffled and cut into the three sets in order.
struct SplitSpec {
    std::optional<std::array<std::size_t, 3>> counts;
    std::array<double, 3> fractions = {0.8, 0.1, 0.1};
    std::optional<std::string> holdout_geography;
    std::uint64_t seed = 0;
};

DatasetSplit split_dataset(std::span<const BuildingRecord> records, const SplitSpec& spec);

// Splits every record of `dataset`.
DatasetSplit split_dataset(const Dataset& dataset, const SplitSpec& spec);

// CSV "id,partition" with partition in {train, validation, test}.
void save_split(const DatasetSplit& split, const std::filesystem::path& path);
DatasetSplit load_split(const std::filesystem::path& path);

} // namespace epc::dataset
