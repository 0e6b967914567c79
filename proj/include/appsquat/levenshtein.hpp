#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "appsquat/threshold.hpp"

namespace appsquat {

// Edit distance over Unicode scalar values (insert, delete, substitute).
std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein_distance(std::string_view a, std::string_view b);

// Exact distance if it is <= max_distance, nullopt otherwise. Only the
// diagonal band of width max_distance is evaluated and the scan stops as soon
// as a whole row exceeds the bound.
std::optional<std::size_t> bounded_levenshtein_distance(std::u32string_view a, std::u32string_view b,
                                                        std::size_t max_distance);

// 1 - distance / max(|a|, |b|), kept as its integer parts.
struct EditRatio {
  std::size_t distance = 0;
  std::size_t length = 0;

  double similarity() const noexcept {
    return 1.0 - static_cast<double>(distance) / static_cast<double>(length);
  }
  bool at_least(const Threshold& t) const noexcept { return t.admits(distance, length); }
};

// Both throw ArgumentError when both strings are empty.
EditRatio levenshtein_ratio(std::string_view a, std::string_view b);
double levenshtein_similarity(std::string_view a, std::string_view b);

}  // namespace appsquat
