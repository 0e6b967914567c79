#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace appsquat {

// A similarity threshold held as an exact rational in (0, 1], so that
// "1 - d/L >= threshold" is decided in integer arithmetic.
class Threshold {
 public:
  Threshold() : Threshold(19, 20) {}
  // Throws ArgumentError unless 0 < numerator <= denominator.
  Threshold(std::uint64_t numerator, std::uint64_t denominator);

  // Plain decimal notation ("0.95", "1", ".9"), up to 12 fractional digits.
  static Threshold from_decimal(std::string_view text);
  // Snaps to the nearest multiple of 1e-9 first.
  static Threshold from_double(double value);

  std::uint64_t numerator() const noexcept { return num_; }
  std::uint64_t denominator() const noexcept { return den_; }
  double value() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }
  std::string to_string() const;

  // Largest edit distance d with 1 - d/length >= threshold.
  std::size_t max_distance(std::size_t length) const noexcept {
    return static_cast<std::size_t>((den_ - num_) * length / den_);
  }
  bool admits(std::size_t distance, std::size_t length) const noexcept {
    return distance * den_ <= (den_ - num_) * length;
  }

  friend bool operator==(const Threshold&, const Threshold&) = default;

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

}  // namespace appsquat
