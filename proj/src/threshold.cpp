#include "appsquat/threshold.hpp"

#include <cmath>
#include <numeric>

#include "appsquat/error.hpp"

namespace appsquat {

Threshold::Threshold(std::uint64_t numerator, std::uint64_t denominator) {
  if (denominator == 0 || numerator == 0 || numerator > denominator) {
    throw ArgumentError("threshold must lie in (0, 1]");
  }
  const std::uint64_t g = std::gcd(numerator, denominator);
  num_ = numerator / g;
  den_ = denominator / g;
}

Threshold Threshold::from_decimal(std::string_view text) {
  std::uint64_t whole = 0;
  std::uint64_t frac = 0;
  std::uint64_t scale = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      if (seen_dot) {
        if (scale >= 1'000'000'000'000ULL) throw ArgumentError("threshold has too many decimal places");
        frac = frac * 10 + static_cast<std::uint64_t>(c - '0');
        scale *= 10;
      } else {
        whole = whole * 10 + static_cast<std::uint64_t>(c - '0');
        if (whole > 1) throw ArgumentError("threshold must lie in (0, 1]");
      }
    } else {
      throw ArgumentError("threshold '" + std::string(text) + "' is not a decimal number");
    }
  }
  if (!seen_digit) throw ArgumentError("threshold '" + std::string(text) + "' is not a decimal number");
  return Threshold(whole * scale + frac, scale);
}

Threshold Threshold::from_double(double value) {
  if (!(value > 0.0 && value <= 1.0)) throw ArgumentError("threshold must lie in (0, 1]");
  constexpr std::uint64_t kScale = 1'000'000'000ULL;
  const auto num = static_cast<std::uint64_t>(std::llround(value * static_cast<double>(kScale)));
  return Threshold(num == 0 ? 1 : num, kScale);
}

std::string Threshold::to_string() const {
  if (num_ == den_) return "1";
  // Denominators produced by the factories divide a power of ten.
  std::uint64_t scale = 1;
  int digits = 0;
  while (scale % den_ != 0 && digits < 18) {
    scale *= 10;
    ++digits;
  }
  if (scale % den_ != 0) return std::to_string(num_) + "/" + std::to_string(den_);
  std::string frac = std::to_string(num_ * (scale / den_));
  frac.insert(0, static_cast<std::size_t>(digits) - frac.size(), '0');
  while (!frac.empty() && frac.back() == '0') frac.pop_back();
  return "0." + frac;
}

}  // namespace appsquat
