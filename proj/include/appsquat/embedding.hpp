#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace appsquat {

struct EmbeddingVector {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

// dot(u, v) / (|u| |v|), clamped to [-1, 1]. Throws ArgumentError on a
// dimension mismatch or a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);
inline double cosine_similarity(const EmbeddingVector& u, const EmbeddingVector& v) {
  return cosine_similarity(u.values, v.values);
}

double l2_norm(std::span<const double> v);

// Maps texts to unit vectors. Implementations are deterministic, preserve
// input order, and may be called concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dim() const = 0;
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
  virtual bool health() = 0;
};

// Feature-hashing bag of tokens: case-fold, split on non-alphanumerics, hash
// each token into one of `dim` buckets, count, L2-normalize. Needs no model.
// A text without alphanumerics counts as a single token.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDim = 256;
  static constexpr std::uint64_t kSeed = 0x5eed'1e55'a991'c0deULL;

  explicit HashingEmbedder(std::size_t dim = kDefaultDim);

  std::size_t dim() const override { return dim_; }
  // Throws ArgumentError for a blank text.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  bool health() override { return true; }

  EmbeddingVector embed_one(std::string_view text) const;
  std::size_t bucket_of(std::string_view token) const;

  static std::vector<std::string> tokenize(std::string_view text);
  // Seeded FNV-1a, stable across platforms and runs.
  static std::uint64_t stable_hash(std::string_view bytes, std::uint64_t seed = kSeed);

 private:
  std::size_t dim_;
};

std::vector<EmbeddingVector> test_embed(std::span<const std::string> texts,
                                        std::size_t dim = HashingEmbedder::kDefaultDim);

}  // namespace appsquat
