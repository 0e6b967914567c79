#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "appsquat/clonedetect.hpp"
#include "appsquat/corpus.hpp"
#include "appsquat/squatgen.hpp"

namespace appsquat {

// Per-group platform co-occurrence counts keyed by an unordered platform
// pair (stored with first <= second).
class CrossPlatformMatrix {
 public:
  using Cell = std::pair<Platform, Platform>;

  void increment(const Platform& p, const Platform& q, std::uint64_t by = 1);
  std::uint64_t at(const Platform& p, const Platform& q) const;
  const std::map<Cell, std::uint64_t>& cells() const noexcept { return cells_; }
  std::uint64_t total() const;

 private:
  static Cell canonical(const Platform& p, const Platform& q);
  std::map<Cell, std::uint64_t> cells_;
};

// A group spanning k > 1 platforms adds one to each of its C(k, 2) pairs; a
// single-platform group adds one to that diagonal cell. Throws ArgumentError
// when a member is not in the corpus.
CrossPlatformMatrix cross_platform_matrix(std::span<const CloneGroup> groups, const Corpus& corpus);

struct GroupAnnotation {
  std::size_t group_index = 0;
  std::size_t platform_count = 0;
  std::optional<std::string> shared_author;  // case-folded, when every member has it
  bool likely_legitimate_cross_post = false;
};

// Flags groups whose members all carry one author and span >= 2 platforms.
std::vector<GroupAnnotation> flag_same_author_cross_platform(std::span<const CloneGroup> groups,
                                                             const Corpus& corpus);

// Edges e0 < e1 < ... < en-1. Bucket 0 is [e0, e1]; bucket i is (ei, ei+1];
// the last bucket is open-ended. A single edge gives one bucket [e0, inf).
class HistogramSpec {
 public:
  // Throws ArgumentError when empty or not strictly increasing.
  explicit HistogramSpec(std::vector<std::uint64_t> edges);
  static HistogramSpec parse(std::string_view comma_separated);

  const std::vector<std::uint64_t>& edges() const noexcept { return edges_; }
  std::size_t bucket_count() const noexcept { return edges_.size(); }
  // nullopt for values below e0.
  std::optional<std::size_t> bucket_of(std::uint64_t value) const;
  std::string label(std::size_t bucket) const;

 private:
  std::vector<std::uint64_t> edges_;
};

struct EngagementHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t below_range = 0;
  std::uint64_t unknown = 0;  // records without a conversation count
  std::optional<AppRecord> max_record;

  std::uint64_t total() const;
};

// Ties for the maximum go to the smallest (platform, id).
EngagementHistogram engagement_histogram(std::span<const AppRecord> records, const HistogramSpec& spec);

struct RankTargeting {
  std::map<std::uint64_t, std::uint64_t> by_rank;
  std::uint64_t unranked = 0;
};

RankTargeting rank_targeting(std::span<const SquatHit> hits);

// Inverse of the standard normal CDF (Acklam's rational approximation plus
// one Halley step; absolute error well under 1e-9). p must be in (0, 1).
double inverse_normal_cdf(double p);
// Two-sided critical value, e.g. 0.95 -> 1.959964.
double z_for_confidence(double confidence);

// Cochran's n0 = z^2 p (1 - p) / e^2 with finite population correction
// n = n0 / (1 + (n0 - 1) / N), rounded up and capped at N.
std::uint64_t sample_size(std::uint64_t population, double confidence, double margin,
                          double proportion = 0.5);

}  // namespace appsquat
