#include "appsquat/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "appsquat/error.hpp"
#include "appsquat/text.hpp"

namespace appsquat {

CrossPlatformMatrix::Cell CrossPlatformMatrix::canonical(const Platform& p, const Platform& q) {
  return q < p ? Cell{q, p} : Cell{p, q};
}

void CrossPlatformMatrix::increment(const Platform& p, const Platform& q, std::uint64_t by) {
  cells_[canonical(p, q)] += by;
}

std::uint64_t CrossPlatformMatrix::at(const Platform& p, const Platform& q) const {
  auto it = cells_.find(canonical(p, q));
  return it == cells_.end() ? 0 : it->second;
}

std::uint64_t CrossPlatformMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& [_, n] : cells_) sum += n;
  return sum;
}

CrossPlatformMatrix cross_platform_matrix(std::span<const CloneGroup> groups, const Corpus& corpus) {
  CrossPlatformMatrix matrix;
  for (const auto& g : groups) {
    std::set<Platform> platforms;
    for (const auto& key : g.members) {
      if (!corpus.find(key)) throw ArgumentError("group member " + to_string(key) + " is not in the corpus");
      platforms.insert(key.platform);
    }
    if (platforms.empty()) continue;
    if (platforms.size() == 1) {
      matrix.increment(*platforms.begin(), *platforms.begin());
      continue;
    }
    for (auto p = platforms.begin(); p != platforms.end(); ++p) {
      for (auto q = std::next(p); q != platforms.end(); ++q) matrix.increment(*p, *q);
    }
  }
  return matrix;
}

std::vector<GroupAnnotation> flag_same_author_cross_platform(std::span<const CloneGroup> groups,
                                                             const Corpus& corpus) {
  std::vector<GroupAnnotation> out;
  out.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    GroupAnnotation note;
    note.group_index = i;
    std::set<Platform> platforms;
    std::set<std::string> authors;
    bool all_authored = true;
    for (const auto& key : groups[i].members) {
      platforms.insert(key.platform);
      const AppRecord* rec = corpus.find(key);
      if (!rec || !rec->author) {
        all_authored = false;
        continue;
      }
      authors.insert(text::casefold(text::canonicalize(*rec->author)));
    }
    note.platform_count = platforms.size();
    if (all_authored && authors.size() == 1) note.shared_author = *authors.begin();
    note.likely_legitimate_cross_post = note.shared_author.has_value() && note.platform_count >= 2;
    out.push_back(std::move(note));
  }
  return out;
}

HistogramSpec::HistogramSpec(std::vector<std::uint64_t> edges) : edges_(std::move(edges)) {
  if (edges_.empty()) throw ArgumentError("histogram needs at least one bucket edge");
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i] <= edges_[i - 1]) throw ArgumentError("histogram edges must be strictly increasing");
  }
}

HistogramSpec HistogramSpec::parse(std::string_view s) {
  std::vector<std::uint64_t> edges;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t comma = s.find(',', start);
    if (comma == std::string_view::npos) comma = s.size();
    const std::string item = text::trim(s.substr(start, comma - start));
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
      throw ArgumentError("histogram edges must be comma-separated non-negative integers");
    }
    edges.push_back(std::stoull(item));
    start = comma + 1;
  }
  return HistogramSpec(std::move(edges));
}

std::optional<std::size_t> HistogramSpec::bucket_of(std::uint64_t value) const {
  if (value < edges_.front()) return std::nullopt;
  if (edges_.size() == 1) return 0;
  // First edge e[i] with value <= e[i], i >= 1; the value sits in bucket i - 1.
  auto it = std::lower_bound(edges_.begin() + 1, edges_.end(), value);
  if (it == edges_.end()) return edges_.size() - 1;
  return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

std::string HistogramSpec::label(std::size_t bucket) const {
  if (bucket >= edges_.size()) throw ArgumentError("histogram bucket out of range");
  if (edges_.size() == 1) return ">=" + std::to_string(edges_[0]);
  if (bucket == edges_.size() - 1) return ">" + std::to_string(edges_.back());
  const std::uint64_t lo = bucket == 0 ? edges_[0] : edges_[bucket] + 1;
  return std::to_string(lo) + "-" + std::to_string(edges_[bucket + 1]);
}

std::uint64_t EngagementHistogram::total() const {
  std::uint64_t sum = below_range + unknown;
  for (auto c : counts) sum += c;
  return sum;
}

EngagementHistogram engagement_histogram(std::span<const AppRecord> records, const HistogramSpec& spec) {
  EngagementHistogram h;
  h.counts.assign(spec.bucket_count(), 0);
  const AppRecord* best = nullptr;
  for (const auto& rec : records) {
    if (!rec.conversation_count) {
      ++h.unknown;
      continue;
    }
    const std::uint64_t v = *rec.conversation_count;
    if (auto b = spec.bucket_of(v)) {
      ++h.counts[*b];
    } else {
      ++h.below_range;
    }
    if (!best || v > *best->conversation_count ||
        (v == *best->conversation_count && rec.key() < best->key())) {
      best = &rec;
    }
  }
  if (best) h.max_record = *best;
  return h;
}

RankTargeting rank_targeting(std::span<const SquatHit> hits) {
  RankTargeting out;
  for (const auto& hit : hits) {
    if (hit.target.rank) {
      ++out.by_rank[*hit.target.rank];
    } else {
      ++out.unranked;
    }
  }
  return out;
}

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("inverse_normal_cdf: p must lie in (0, 1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01, -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the exact CDF.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) throw ArgumentError("confidence must lie in (0, 1)");
  return inverse_normal_cdf(1.0 - (1.0 - confidence) / 2.0);
}

std::uint64_t sample_size(std::uint64_t population, double confidence, double margin, double proportion) {
  if (population < 1) throw ArgumentError("population must be >= 1");
  if (!(margin > 0.0 && margin < 1.0)) throw ArgumentError("margin must lie in (0, 1)");
  if (!(proportion > 0.0 && proportion < 1.0)) throw ArgumentError("proportion must lie in (0, 1)");
  const double z = z_for_confidence(confidence);
  const double n0 = z * z * proportion * (1.0 - proportion) / (margin * margin);
  const double N = static_cast<double>(population);
  const double n = n0 / (1.0 + (n0 - 1.0) / N);
  const double rounded = std::ceil(n);
  if (rounded >= N) return population;
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(rounded));
}

}  // namespace appsquat
