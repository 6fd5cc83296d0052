#include "epc/dataset/split.hpp"

#include <algorithm>
#include <cmath>

#include "epc/core/rng.hpp"
#include "epc/core/text.hpp"

namespace epc::dataset {

const std::vector<std::string>& DatasetSplit::ids(Partition p) const {
    switch (p) {
        case Partition::Train: return train;
        case Partition::Validation: return validation;
        case Partition::Test: return test;
    }
    return test;
}

DatasetSplit split_dataset(std::span<const BuildingRecord> records, const SplitSpec& spec) {
    if (!spec.counts) {
        const double total = spec.fractions[0] + spec.fractions[1] + spec.fractions[2];
        if (std::abs(total - 1.0) > 1e-9) throw InvalidArgument("split fractions must sum to 1");
        for (const double f : spec.fractions)
            if (f < 0.0) throw InvalidArgument("split fractions must be non-negative");
    }

    std::vector<std::string> pool, holdout;
    for (const auto& r : records) {
        if (spec.holdout_geography && r.geography == *spec.holdout_geography)
            holdout.push_back(r.id);
        else
            pool.push_back(r.id);
    }
    if (spec.holdout_geography && holdout.empty())
        throw InvalidArgument("holdout geography '" + *spec.holdout_geography + "' has no records");

    // Sorting first makes the result independent of record storage order.
    std::sort(pool.begin(), pool.end());
    std::sort(holdout.begin(), holdout.end());
    Rng rng(spec.seed);
    rng.shuffle(std::span<std::string>(pool));

    std::size_t n_train = 0, n_val = 0;
    const std::size_t n = records.size();
    if (spec.counts) {
        const auto [c_train, c_val, c_test] = *spec.counts;
        if (c_train + c_val + c_test != n)
            throw InvalidArgument("split counts sum to " + std::to_string(c_train + c_val + c_test) + ", dataset has " +
                                  std::to_string(n) + " records");
        if (spec.holdout_geography && c_test != holdout.size())
            throw InvalidArgument("test count " + std::to_string(c_test) + " differs from the " +
                                  std::to_string(holdout.size()) + " holdout records");
        n_train = c_train;
        n_val = c_val;
    } else if (spec.holdout_geography) {
        const double tv = spec.fractions[0] + spec.fractions[1];
        if (!(tv > 0.0)) throw InvalidArgument("train and validation fractions are both zero");
        n_train = static_cast<std::size_t>(std::llround(spec.fractions[0] / tv * static_cast<double>(pool.size())));
        n_val = pool.size() - n_train;
    } else {
        n_train = static_cast<std::size_t>(std::floor(spec.fractions[0] * static_cast<double>(n)));
        n_val = static_cast<std::size_t>(std::floor(spec.fractions[1] * static_cast<double>(n)));
    }

    DatasetSplit split;
    split.holdout_geography = spec.holdout_geography;
    split.train.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.validation.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train),
                            pool.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    split.test.assign(pool.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), pool.end());
    split.test.insert(split.test.end(), holdout.begin(), holdout.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

DatasetSplit split_dataset(const Dataset& dataset, const SplitSpec& spec) {
    return split_dataset(std::span<const BuildingRecord>(dataset.records()), spec);
}

void save_split(const DatasetSplit& split, const std::filesystem::path& path) {
    std::string out = "id,partition\n";
    for (const auto& id : split.train) out += csv_field(id) + ",train\n";
    for (const auto& id : split.validation) out += csv_field(id) + ",validation\n";
    for (const auto& id : split.test) out += csv_field(id) + ",test\n";
    write_text_file(path, out);
}

DatasetSplit load_split(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    if (lines.empty() || lines.front() != "id,partition") throw DataError(path.string() + ": bad split header");
    DatasetSplit split;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto f = split_csv_line(lines[i]);
        if (f.size() != 2) throw DataError(path.string() + ": malformed split line");
        if (f[1] == "train") split.train.push_back(f[0]);
        else if (f[1] == "validation") split.validation.push_back(f[0]);
        else if (f[1] == "test") split.test.push_back(f[0]);
        else throw DataError(path.string() + ": unknown partition '" + f[1] + "'");
    }
    return split;
}

} // namespace epc::dataset
