#pragma once

#include <span>
#include <vector>

#include "epc/core/error.hpp"
#include "epc/eval/metrics.hpp"

namespace epc::classic {

template <typename Candidate>
struct SearchResult {
    std::size_t best_index = 0;
    Candidate best;
    std::vector<eval::MetricReport> reports;  // one per candidate, input order
};

// Evaluates every candidate on validation data and keeps the highest macro-F1;
// ties keep the earliest candidate. `evaluate(candidate)` fits on the training
// split and returns the validation report.
template <typename Candidate, typename Evaluate>
SearchResult<Candidate> hyperparam_search(std::span<const Candidate> candidates, Evaluate&& evaluate) {
    if (candidates.empty()) throw InvalidArgument("hyperparam_search: no candidates");
    SearchResult<Candidate> result{0, candidates.front(), {}};
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        result.reports.push_back(evaluate(candidates[i]));
        if (result.reports.back().f1_macro > result.reports[result.best_index].f1_macro) result.best_index = i;
    }
    result.best = candidates[result.best_index];
    return result;
}

// Eight log-spaced values 1e-4 ... 1e3.
std::vector<double> default_svm_c_grid();

// Odd neighbour counts 1 ... 9.
std::vector<std::size_t> default_knn_k_grid();

} // namespace epc::classic
