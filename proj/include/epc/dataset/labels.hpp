#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace epc::dataset {

// EPC rating; the enumerator order is the efficiency order, A best and G worst.
enum class Grade : std::uint8_t { A, B, C, D, E, F, G };

enum class BinaryClass : std::uint8_t { Efficient = 0, Inefficient = 1 };

inline constexpr std::size_t kNumClasses = 2;

Grade parse_grade(std::string_view text);
char grade_letter(Grade grade);

inline constexpr int class_index(BinaryClass c) { return static_cast<int>(c); }
inline constexpr BinaryClass class_from_index(int i) {
    return i == 0 ? BinaryClass::Efficient : BinaryClass::Inefficient;
}

// A-D are efficient, E-G inefficient.
BinaryClass binarize_label(Grade grade);

// Worst grade over the units of one building. Throws InvalidArgument on an empty list.
Grade aggregate_units(std::span<const Grade> unit_labels);

// Inverse-frequency weights N / (2 N_c), indexed by class. Both classes must be present.
std::array<double, kNumClasses> class_weights(std::span<const BinaryClass> labels);

} // namespace epc::dataset
