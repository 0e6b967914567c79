#include "appsquat/clonedetect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_map>

#include "appsquat/error.hpp"
#include "appsquat/levenshtein.hpp"
#include "appsquat/parallel.hpp"
#include "appsquat/text.hpp"
#include "appsquat/union_find.hpp"

namespace appsquat {
namespace {

constexpr std::array<std::string_view, 3> kFieldNames{"name", "description", "instructions"};
constexpr std::array<std::string_view, 3> kMethodNames{"exact", "levenshtein", "embedding"};

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct Candidate {
  std::size_t record;
  std::u32string text;
};

std::vector<SimilarityEdge> merge(std::vector<std::vector<SimilarityEdge>>& per_worker) {
  std::vector<SimilarityEdge> out;
  for (auto& part : per_worker) {
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  sort_edges(out);
  return out;
}

}  // namespace

std::string_view field_name(TextField f) { return kFieldNames.at(static_cast<std::size_t>(f)); }
std::string_view method_name(DetectorMethod m) { return kMethodNames.at(static_cast<std::size_t>(m)); }

TextField parse_field(std::string_view s) {
  const std::string key = lower_ascii(s);
  for (std::size_t i = 0; i < kFieldNames.size(); ++i) {
    if (key == kFieldNames[i]) return static_cast<TextField>(i);
  }
  throw ArgumentError("unknown field '" + std::string(s) + "' (expected name, description or instructions)");
}

DetectorMethod parse_method(std::string_view s) {
  const std::string key = lower_ascii(s);
  if (key == "exact" || key == "exactmatch" || key == "exact-match") return DetectorMethod::ExactMatch;
  if (key == "levenshtein" || key == "lev") return DetectorMethod::Levenshtein;
  if (key == "embedding" || key == "semantic" || key == "sem") return DetectorMethod::Embedding;
  throw ArgumentError("unknown detector method '" + std::string(s) + "'");
}

std::optional<std::string_view> field_text(const AppRecord& rec, TextField field) {
  const std::optional<std::string>* value = nullptr;
  switch (field) {
    case TextField::Name:
      if (rec.name.empty()) return std::nullopt;
      return std::string_view(rec.name);
    case TextField::Description: value = &rec.description; break;
    case TextField::Instructions: value = &rec.instructions; break;
  }
  if (!value->has_value() || (*value)->empty()) return std::nullopt;
  return std::string_view(**value);
}

void DetectorConfig::validate() const {
  if (min_chars > max_chars) throw ArgumentError("min_chars must not exceed max_chars");
  if (jobs == 0) throw ArgumentError("jobs must be >= 1");
  if (embed_batch == 0) throw ArgumentError("embedding batch size must be >= 1");
}

SimilarityEdge make_edge(RecordKey x, RecordKey y, TextField field, DetectorMethod method, double score) {
  if (x == y) throw ArgumentError("self-edge on " + to_string(x));
  if (!(score >= 0.0 && score <= 1.0)) throw ArgumentError("edge score outside [0, 1]");
  if (y < x) std::swap(x, y);
  return {std::move(x), std::move(y), field, method, score};
}

void sort_edges(std::vector<SimilarityEdge>& edges) {
  std::sort(edges.begin(), edges.end(), [](const SimilarityEdge& l, const SimilarityEdge& r) {
    return std::tie(l.a, l.b) < std::tie(r.a, r.b);
  });
}

std::vector<CloneGroup> exact_match_groups(const Corpus& corpus, TextField field) {
  std::map<std::string_view, std::vector<RecordKey>> by_text;
  for (const auto& rec : corpus.records()) {
    if (auto t = field_text(rec, field)) by_text[*t].push_back(rec.key());
  }
  std::vector<CloneGroup> groups;
  for (auto& [_, members] : by_text) {
    if (members.size() < 2) continue;
    std::sort(members.begin(), members.end());
    groups.push_back({std::move(members), field, DetectorMethod::ExactMatch});
  }
  std::sort(groups.begin(), groups.end(),
            [](const CloneGroup& l, const CloneGroup& r) { return l.members.front() < r.members.front(); });
  return groups;
}

std::vector<SimilarityEdge> levenshtein_clone_edges(const Corpus& corpus, TextField field,
                                                    const DetectorConfig& cfg) {
  cfg.validate();
  std::vector<Candidate> cands;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto t = field_text(corpus[i], field);
    if (!t) continue;
    std::u32string cps = text::to_u32(*t);
    if (cps.size() < cfg.min_chars || cps.empty()) continue;
    cands.push_back({i, std::move(cps)});
  }
  std::sort(cands.begin(), cands.end(), [&](const Candidate& l, const Candidate& r) {
    if (l.text.size() != r.text.size()) return l.text.size() < r.text.size();
    return corpus[l.record].key() < corpus[r.record].key();
  });

  const unsigned jobs = std::max(1u, cfg.jobs);
  std::vector<std::vector<SimilarityEdge>> found(jobs);
  parallel_for(cands.size(), jobs, [&](std::size_t i, unsigned worker) {
    const Candidate& lhs = cands[i];
    for (std::size_t j = i + 1; j < cands.size(); ++j) {
      const Candidate& rhs = cands[j];
      const std::size_t longer = rhs.text.size();
      const std::size_t budget = cfg.threshold.max_distance(longer);
      // The gap grows at least as fast as the budget, so nothing later fits.
      if (longer - lhs.text.size() > budget) break;
      if (cfg.exclude_exact && lhs.text == rhs.text) continue;
      auto d = bounded_levenshtein_distance(lhs.text, rhs.text, budget);
      if (!d) continue;
      const EditRatio ratio{*d, longer};
      if (!ratio.at_least(cfg.threshold)) continue;
      found[worker].push_back(make_edge(corpus[lhs.record].key(), corpus[rhs.record].key(), field,
                                        DetectorMethod::Levenshtein, ratio.similarity()));
    }
  });
  return merge(found);
}

std::vector<SimilarityEdge> semantic_clone_edges(const Corpus& corpus, TextField field,
                                                 EmbeddingProvider& provider, const DetectorConfig& cfg) {
  cfg.validate();
  // Distinct eligible texts, and which of them each eligible record carries.
  std::vector<std::string> texts;
  std::unordered_map<std::string_view, std::size_t> text_slot;
  std::vector<std::pair<std::size_t, std::size_t>> eligible;  // (record, text slot)
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto t = field_text(corpus[i], field);
    if (!t) continue;
    const std::size_t len = text::length(*t);
    if (len < cfg.min_chars || len > cfg.max_chars) continue;
    auto [it, fresh] = text_slot.try_emplace(*t, texts.size());
    if (fresh) texts.emplace_back(*t);
    eligible.emplace_back(i, it->second);
  }
  std::sort(eligible.begin(), eligible.end(), [&](const auto& l, const auto& r) {
    return corpus[l.first].key() < corpus[r.first].key();
  });

  std::vector<EmbeddingVector> vectors;
  vectors.reserve(texts.size());
  const std::span<const std::string> all(texts);
  for (std::size_t begin = 0, batch = 0; begin < texts.size(); begin += cfg.embed_batch, ++batch) {
    const std::size_t count = std::min(cfg.embed_batch, texts.size() - begin);
    std::vector<EmbeddingVector> got;
    try {
      got = provider.embed(all.subspan(begin, count));
    } catch (const std::exception& e) {
      throw PipelineError("embedding batch " + std::to_string(batch) + " (" + std::to_string(count) +
                          " texts) failed: " + e.what());
    }
    if (got.size() != count) {
      throw PipelineError("embedding batch " + std::to_string(batch) + ": provider returned " +
                          std::to_string(got.size()) + " vectors for " + std::to_string(count) + " texts");
    }
    for (auto& v : got) {
      if (v.dim() == 0 || (!vectors.empty() && v.dim() != vectors.front().dim())) {
        throw PipelineError("embedding batch " + std::to_string(batch) + ": inconsistent dimension");
      }
      vectors.push_back(std::move(v));
    }
  }

  // Same arithmetic as cosine_similarity, with the norms computed once.
  std::vector<double> norms(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    double sq = 0.0;
    for (double x : vectors[i].values) sq += x * x;
    if (sq == 0.0) throw PipelineError("embedding provider returned a zero vector");
    norms[i] = std::sqrt(sq);
  }

  // Rounding slack: a pair whose true cosine equals the threshold must pass.
  const double threshold = cfg.threshold.value() - kCosineSlack;
  const unsigned jobs = std::max(1u, cfg.jobs);
  std::vector<std::vector<SimilarityEdge>> found(jobs);
  parallel_for(eligible.size(), jobs, [&](std::size_t i, unsigned worker) {
    const auto [ri, si] = eligible[i];
    const auto& u = vectors[si].values;
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      const auto [rj, sj] = eligible[j];
      if (cfg.exclude_exact && si == sj) continue;
      const auto& v = vectors[sj].values;
      double dot = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) dot += u[k] * v[k];
      const double cos = std::clamp(dot / (norms[si] * norms[sj]), -1.0, 1.0);
      if (cos < threshold) continue;
      found[worker].push_back(
          make_edge(corpus[ri].key(), corpus[rj].key(), field, DetectorMethod::Embedding, cos));
    }
  });
  return merge(found);
}

std::vector<CloneGroup> group_edges(std::span<const SimilarityEdge> edges) {
  if (edges.empty()) return {};
  const TextField field = edges.front().field;
  const DetectorMethod method = edges.front().method;
  std::map<RecordKey, std::size_t> ids;
  for (const auto& e : edges) {
    if (e.field != field || e.method != method) {
      throw ArgumentError("group_edges: edges mix detector methods or fields");
    }
    if (e.a == e.b) throw ArgumentError("group_edges: self-edge on " + to_string(e.a));
    ids.try_emplace(e.a, ids.size());
    ids.try_emplace(e.b, ids.size());
  }
  DisjointSet dsu(ids.size());
  for (const auto& e : edges) dsu.unite(ids.at(e.a), ids.at(e.b));

  std::map<std::size_t, std::vector<RecordKey>> components;
  for (const auto& [key, id] : ids) components[dsu.find(id)].push_back(key);  // keys arrive sorted

  std::vector<CloneGroup> groups;
  groups.reserve(components.size());
  for (auto& [_, members] : components) groups.push_back({std::move(members), field, method});
  std::sort(groups.begin(), groups.end(),
            [](const CloneGroup& l, const CloneGroup& r) { return l.members.front() < r.members.front(); });
  return groups;
}

}  // namespace appsquat
