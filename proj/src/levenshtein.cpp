#include "appsquat/levenshtein.hpp"

#include <algorithm>
#include <vector>

#include "appsquat/error.hpp"
#include "appsquat/text.hpp"

namespace appsquat {
namespace {

// Drops the shared prefix and suffix; neither can change the distance.
void strip_common(std::u32string_view& a, std::u32string_view& b) {
  std::size_t p = 0;
  while (p < a.size() && p < b.size() && a[p] == b[p]) ++p;
  a.remove_prefix(p);
  b.remove_prefix(p);
  std::size_t s = 0;
  while (s < a.size() && s < b.size() && a[a.size() - 1 - s] == b[b.size() - 1 - s]) ++s;
  a.remove_suffix(s);
  b.remove_suffix(s);
}

}  // namespace

std::size_t levenshtein_distance(std::u32string_view a, std::u32string_view b) {
  strip_common(a, b);
  if (a.size() > b.size()) std::swap(a, b);
  if (a.empty()) return b.size();

  thread_local std::vector<std::size_t> row;
  row.resize(a.size() + 1);
  for (std::size_t i = 0; i <= a.size(); ++i) row[i] = i;
  for (std::size_t j = 1; j <= b.size(); ++j) {
    std::size_t diag = row[0];
    row[0] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
      const std::size_t up = row[i];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[i] = std::min({up + 1, row[i - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[a.size()];
}

std::size_t levenshtein_distance(std::string_view a, std::string_view b) {
  return levenshtein_distance(text::to_u32(a), text::to_u32(b));
}

std::optional<std::size_t> bounded_levenshtein_distance(std::u32string_view a, std::u32string_view b,
                                                        std::size_t k) {
  if (a.size() > b.size()) std::swap(a, b);
  if (b.size() - a.size() > k) return std::nullopt;
  strip_common(a, b);
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  if (n == 0) return m <= k ? std::optional<std::size_t>(m) : std::nullopt;

  const std::size_t inf = k + 1;
  thread_local std::vector<std::size_t> prev_buf, cur_buf;
  prev_buf.assign(m + 1, inf);
  cur_buf.assign(m + 1, inf);
  std::size_t* prev = prev_buf.data();
  std::size_t* cur = cur_buf.data();
  for (std::size_t j = 0; j <= std::min(m, k); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t lo = i > k ? i - k : 1;
    const std::size_t hi = std::min(m, i + k);
    cur[lo - 1] = lo == 1 ? std::min(i, inf) : inf;
    std::size_t row_min = cur[lo - 1];
    const char32_t ca = a[i - 1];
    for (std::size_t j = lo; j <= hi; ++j) {
      std::size_t v = prev[j - 1] + (ca == b[j - 1] ? 0 : 1);
      v = std::min(v, prev[j] + 1);
      v = std::min(v, cur[j - 1] + 1);
      v = std::min(v, inf);
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    if (hi < m) cur[hi + 1] = inf;
    if (row_min > k) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[m] > k) return std::nullopt;
  return prev[m];
}

EditRatio levenshtein_ratio(std::string_view a, std::string_view b) {
  const std::u32string ua = text::to_u32(a);
  const std::u32string ub = text::to_u32(b);
  if (ua.empty() && ub.empty()) throw ArgumentError("levenshtein similarity of two empty strings is undefined");
  return {levenshtein_distance(ua, ub), std::max(ua.size(), ub.size())};
}

double levenshtein_similarity(std::string_view a, std::string_view b) {
  return levenshtein_ratio(a, b).similarity();
}

}  // namespace appsquat
