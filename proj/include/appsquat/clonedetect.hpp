#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "appsquat/corpus.hpp"
#include "appsquat/embedding.hpp"
#include "appsquat/threshold.hpp"

namespace appsquat {

enum class TextField { Name, Description, Instructions };
enum class DetectorMethod { ExactMatch, Levenshtein, Embedding };

std::string_view field_name(TextField f);
std::string_view method_name(DetectorMethod m);
// Case-insensitive; throws ArgumentError for unknown names.
TextField parse_field(std::string_view s);
DetectorMethod parse_method(std::string_view s);

// The field's text, or nullopt when absent or empty.
std::optional<std::string_view> field_text(const AppRecord& rec, TextField field);

struct DetectorConfig {
  Threshold threshold{19, 20};
  std::size_t min_chars = 50;
  std::size_t max_chars = 512;  // Embedding only
  bool exclude_exact = true;
  unsigned jobs = 1;
  std::size_t embed_batch = 64;

  static DetectorConfig levenshtein_defaults() { return {}; }
  static DetectorConfig embedding_defaults() {
    DetectorConfig c;
    c.exclude_exact = false;
    return c;
  }
  // Throws ArgumentError when min_chars > max_chars or a count is zero.
  void validate() const;
};

struct SimilarityEdge {
  RecordKey a;  // a < b
  RecordKey b;
  TextField field;
  DetectorMethod method;
  double score;

  friend bool operator==(const SimilarityEdge&, const SimilarityEdge&) = default;
};

// Orders the endpoints; throws ArgumentError for a self-edge or a score
// outside [0, 1].
SimilarityEdge make_edge(RecordKey x, RecordKey y, TextField field, DetectorMethod method, double score);
// By (a, b).
void sort_edges(std::vector<SimilarityEdge>& edges);

struct CloneGroup {
  std::vector<RecordKey> members;  // sorted, size >= 2
  TextField field;
  DetectorMethod method;

  friend bool operator==(const CloneGroup&, const CloneGroup&) = default;
};

// Records whose field is byte-identical, grouped, ordered by smallest member.
std::vector<CloneGroup> exact_match_groups(const Corpus& corpus, TextField field);

// Every pair with min_chars <= length and similarity >= threshold
// (similarity 1 only when exclude_exact is false). Candidates are visited in
// length order and cut off by the length-difference bound, and each distance
// is computed in a band; both prunings only discard pairs that cannot pass.
std::vector<SimilarityEdge> levenshtein_clone_edges(const Corpus& corpus, TextField field,
                                                    const DetectorConfig& cfg);

// Cosines this far below the threshold still count as reaching it.
inline constexpr double kCosineSlack = 1e-12;

// Embeds every eligible text (min_chars <= length <= max_chars) once, in
// batches of cfg.embed_batch, and reports pairs with cosine >= threshold.
// A provider failure throws PipelineError naming the batch.
std::vector<SimilarityEdge> semantic_clone_edges(const Corpus& corpus, TextField field,
                                                 EmbeddingProvider& provider, const DetectorConfig& cfg);

// Connected components. Throws ArgumentError when edges mix method or field.
std::vector<CloneGroup> group_edges(std::span<const SimilarityEdge> edges);

}  // namespace appsquat
