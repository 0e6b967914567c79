#include "appsquat/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "appsquat/error.hpp"
#include "appsquat/text.hpp"

namespace appsquat {

double l2_norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ArgumentError("cosine_similarity: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                        std::to_string(v.size()) + ")");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    uu += u[i] * u[i];
    vv += v[i] * v[i];
  }
  if (uu == 0.0 || vv == 0.0) throw ArgumentError("cosine_similarity: zero vector");
  return std::clamp(dot / (std::sqrt(uu) * std::sqrt(vv)), -1.0, 1.0);
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ArgumentError("embedding dimension must be positive");
}

std::uint64_t HashingEmbedder::stable_hash(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::string> HashingEmbedder::tokenize(std::string_view raw) {
  const std::u32string folded = text::to_u32(text::casefold(text::nfc(raw)));
  std::vector<std::string> tokens;
  std::u32string current;
  for (char32_t c : folded) {
    if (text::is_alnum(c)) {
      current.push_back(c);
    } else if (!current.empty()) {
      tokens.push_back(text::to_utf8(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(text::to_utf8(current));
  return tokens;
}

std::size_t HashingEmbedder::bucket_of(std::string_view token) const {
  return static_cast<std::size_t>(stable_hash(token) % dim_);
}

EmbeddingVector HashingEmbedder::embed_one(std::string_view text) const {
  auto tokens = tokenize(text);
  if (tokens.empty()) {
    // Emoji- or symbol-only text: the whole folded text is one token.
    std::string whole = text::trim(text::casefold(text::nfc(text)));
    if (whole.empty()) throw ArgumentError("test embedder: text is blank");
    tokens.push_back(std::move(whole));
  }
  EmbeddingVector v{std::vector<double>(dim_, 0.0)};
  for (const auto& t : tokens) v.values[bucket_of(t)] += 1.0;
  const double norm = l2_norm(v.values);
  for (double& x : v.values) x /= norm;
  return v;
}

std::vector<EmbeddingVector> HashingEmbedder::embed(std::span<const std::string> texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

std::vector<EmbeddingVector> test_embed(std::span<const std::string> texts, std::size_t dim) {
  return HashingEmbedder(dim).embed(texts);
}

}  // namespace appsquat
