#include "epc/dataset/labels.hpp"

#include <algorithm>
#include <string>

#include "epc/core/error.hpp"
#include "epc/core/text.hpp"

namespace epc::dataset {

Grade parse_grade(std::string_view text) {
    const auto t = trim(text);
    if (t.size() == 1) {
        const char c = static_cast<char>(t[0] & ~0x20);  // upper-case ASCII
        if (c >= 'A' && c <= 'G') return static_cast<Grade>(c - 'A');
    }
    throw DataError("invalid EPC grade '" + std::string(t) + "'");
}

char grade_letter(Grade grade) { return static_cast<char>('A' + static_cast<int>(grade)); }

BinaryClass binarize_label(Grade grade) {
    return grade <= Grade::D ? BinaryClass::Efficient : BinaryClass::Inefficient;
}

Grade aggregate_units(std::span<const Grade> unit_labels) {
    if (unit_labels.empty()) throw InvalidArgument("aggregate_units: building has no unit labels");
    return *std::max_element(unit_labels.begin(), unit_labels.end());
}

std::array<double, kNumClasses> class_weights(std::span<const BinaryClass> labels) {
    std::array<std::size_t, kNumClasses> counts{};
    for (const auto c : labels) ++counts[class_index(c)];
    if (counts[0] == 0 || counts[1] == 0) throw InvalidArgument("class_weights: both classes must be present");
    const auto n = static_cast<double>(labels.size());
    return {n / (kNumClasses * static_cast<double>(counts[0])), n / (kNumClasses * static_cast<double>(counts[1]))};
}

} // namespace epc::dataset
