#include "doctest.h"

#include <cmath>
#include <random>
#include <set>

#include "appsquat/clonedetect.hpp"
#include "appsquat/embedding.hpp"
#include "appsquat/error.hpp"
#include "appsquat/text.hpp"
#include "appsquat/union_find.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace appsquat;

namespace {

AppRecord with_instructions(std::string id, Platform p, std::optional<std::string> instr) {
  AppRecord r = gen::record(std::move(id), std::move(p), "app");
  r.instructions = std::move(instr);
  return r;
}

RecordKey key(const std::string& id) { return {Platform(Platform::Kind::Poe), id}; }

std::map<oracle::EdgeKey, double> as_map(const std::vector<SimilarityEdge>& edges) {
  std::map<oracle::EdgeKey, double> out;
  for (const auto& e : edges) out[{e.a, e.b}] = e.score;
  return out;
}

// Each embedding-free pair test reuses the brute-force oracle.
struct SemanticOracle {
  std::map<oracle::EdgeKey, double> edges;
  std::size_t near_boundary = 0;  // decided in exact arithmetic
};

SemanticOracle brute_force_cosine(const Corpus& c, const DetectorConfig& cfg, std::size_t dim) {
  HashingEmbedder emb(dim);
  std::vector<std::pair<RecordKey, std::vector<double>>> eligible;
  std::vector<std::string> texts;
  for (const auto& r : c.records()) {
    if (!r.instructions) continue;
    const auto len = text::to_u32(*r.instructions).size();
    if (len < cfg.min_chars || len > cfg.max_chars) continue;
    eligible.emplace_back(r.key(), emb.embed_one(*r.instructions).values);
    texts.push_back(*r.instructions);
  }
  SemanticOracle out;
  const double t = cfg.threshold.value();
  for (std::size_t i = 0; i < eligible.size(); ++i) {
    for (std::size_t j = i + 1; j < eligible.size(); ++j) {
      if (cfg.exclude_exact && texts[i] == texts[j]) continue;
      const double cos = oracle::cosine(eligible[i].second, eligible[j].second);
      bool edge = cos >= t;
      if (std::abs(cos - t) < 1e-9) {
        edge = oracle::exact_cosine_admits(emb, texts[i], texts[j], cfg.threshold);
        ++out.near_boundary;
      }
      if (!edge) continue;
      RecordKey a = eligible[i].first, b = eligible[j].first;
      if (b < a) std::swap(a, b);
      out.edges[{a, b}] = cos;
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("clonedetect") {
  TEST_CASE("field and method names") {
    CHECK(parse_field("Instructions") == TextField::Instructions);
    CHECK(parse_method("lev") == DetectorMethod::Levenshtein);
    CHECK(parse_method("semantic") == DetectorMethod::Embedding);
    CHECK(field_name(TextField::Description) == "description");
    CHECK(method_name(DetectorMethod::ExactMatch) == "exact");
    CHECK_THROWS_AS(parse_field("title"), ArgumentError);
  }

  TEST_CASE("edge canonicalization") {
    const auto e = make_edge(key("b"), key("a"), TextField::Name, DetectorMethod::Levenshtein, 0.97);
    CHECK(e.a == key("a"));
    CHECK(e.b == key("b"));
    CHECK_THROWS_AS(make_edge(key("a"), key("a"), TextField::Name, DetectorMethod::Levenshtein, 1.0), ArgumentError);
    CHECK_THROWS_AS(make_edge(key("a"), key("b"), TextField::Name, DetectorMethod::Levenshtein, 1.1), ArgumentError);
  }

  TEST_CASE("exact groups: identical pair, none, and {3,2,2}") {
    const std::string help = "You are a helpful writing assistant.";
    const Corpus two({with_instructions("1", Platform(Platform::Kind::Poe), help),
                      with_instructions("2", Platform(Platform::Kind::Coze), help)});
    const auto g = exact_match_groups(two, TextField::Instructions);
    REQUIRE(g.size() == 1);
    CHECK(g[0].members.size() == 2);
    CHECK(g[0].method == DetectorMethod::ExactMatch);

    const Corpus distinct({with_instructions("1", Platform(Platform::Kind::Poe), "a"),
                           with_instructions("2", Platform(Platform::Kind::Poe), "b"),
                           with_instructions("3", Platform(Platform::Kind::Poe), std::nullopt)});
    CHECK(exact_match_groups(distinct, TextField::Instructions).empty());

    std::vector<AppRecord> recs;
    int id = 0;
    for (auto [text, copies] : std::initializer_list<std::pair<const char*, int>>{
             {"alpha text", 3}, {"beta text", 2}, {"gamma text", 2}}) {
      for (int i = 0; i < copies; ++i) {
        recs.push_back(with_instructions("x" + std::to_string(id++), gen::platforms()[id % 6], text));
      }
    }
    for (int i = 0; i < 20; ++i) {
      recs.push_back(with_instructions("u" + std::to_string(i), gen::platforms()[i % 6], "unique " + std::to_string(i)));
    }
    std::shuffle(recs.begin(), recs.end(), std::mt19937_64(4));
    const auto groups = exact_match_groups(Corpus(recs), TextField::Instructions);
    std::multiset<std::size_t> sizes;
    for (const auto& gr : groups) {
      sizes.insert(gr.members.size());
      CHECK(std::is_sorted(gr.members.begin(), gr.members.end()));
    }
    CHECK(sizes == std::multiset<std::size_t>{2, 2, 3});
    for (std::size_t i = 1; i < groups.size(); ++i) CHECK(groups[i - 1].members[0] < groups[i].members[0]);
  }

  TEST_CASE("two 60-char texts two edits apart") {
    const std::string a = "Act as a travel planner and suggest a three day itinerary ok";
    REQUIRE(text::length(a) == 60);
    std::string b = a;
    b[5] = 'X';
    b[40] = 'Y';
    const Corpus c({with_instructions("1", Platform(Platform::Kind::Poe), a),
                    with_instructions("2", Platform(Platform::Kind::FlowGPT), b)});
    DetectorConfig cfg;
    cfg.threshold = Threshold::from_decimal("0.95");
    const auto edges = levenshtein_clone_edges(c, TextField::Instructions, cfg);
    REQUIRE(edges.size() == 1);
    CHECK(edges[0].score == doctest::Approx(58.0 / 60.0).epsilon(1e-12));
    CHECK(std::abs(edges[0].score - 0.9667) < 5e-5);
    CHECK(edges[0].method == DetectorMethod::Levenshtein);
  }

  TEST_CASE("identical texts: excluded by default, included on request") {
    const std::string t(80, 'z');
    const Corpus c({with_instructions("1", Platform(Platform::Kind::Poe), t),
                    with_instructions("2", Platform(Platform::Kind::Coze), t)});
    DetectorConfig cfg;
    CHECK(levenshtein_clone_edges(c, TextField::Instructions, cfg).empty());
    cfg.exclude_exact = false;
    const auto e = levenshtein_clone_edges(c, TextField::Instructions, cfg);
    REQUIRE(e.size() == 1);
    CHECK(e[0].score == 1.0);
  }

  TEST_CASE("min_chars counts code points") {
    std::string base;
    for (int i = 0; i < 49; ++i) base += "é";  // 49 code points, 98 bytes
    std::string other = base;
    other.replace(0, 2, "e");
    const Corpus c({with_instructions("1", Platform(Platform::Kind::Poe), base),
                    with_instructions("2", Platform(Platform::Kind::Coze), other)});
    DetectorConfig cfg;
    CHECK(levenshtein_clone_edges(c, TextField::Instructions, cfg).empty());
    cfg.min_chars = 49;
    CHECK(levenshtein_clone_edges(c, TextField::Instructions, cfg).size() == 1);
  }

  TEST_CASE("pruned pipeline equals brute force on 2,000 records") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto c = gen::random_text_corpus(seed, 2000, 14, 36, 150);
      for (auto [num, den, exclude] :
           std::initializer_list<std::tuple<unsigned, unsigned, bool>>{{19, 20, true}, {17, 20, false}}) {
        DetectorConfig cfg;
        cfg.threshold = Threshold(num, den);
        cfg.min_chars = 12;
        cfg.exclude_exact = exclude;
        const auto edges = levenshtein_clone_edges(c, TextField::Instructions, cfg);
        const auto expected = oracle::brute_force_levenshtein(c, TextField::Instructions, num, den, 12, exclude);
        std::map<oracle::EdgeKey, std::size_t> got;
        for (const auto& e : edges) {
          const auto la = text::length(*c.find(e.a)->instructions);
          const auto lb = text::length(*c.find(e.b)->instructions);
          const auto len = std::max(la, lb);
          got[{e.a, e.b}] = static_cast<std::size_t>(std::llround((1.0 - e.score) * static_cast<double>(len)));
        }
        CHECK(got.size() == edges.size());
        CHECK(got == expected);
        CHECK_FALSE(expected.empty());
      }
    }
  }

  TEST_CASE("parallel runs give identical edges") {
    const auto c = gen::random_text_corpus(9, 800, 14, 36, 60);
    DetectorConfig cfg;
    cfg.min_chars = 12;
    cfg.threshold = Threshold(9, 10);
    const auto one = levenshtein_clone_edges(c, TextField::Instructions, cfg);
    cfg.jobs = 4;
    CHECK(levenshtein_clone_edges(c, TextField::Instructions, cfg) == one);
  }

  TEST_CASE("semantic: identical 100-char texts score 1") {
    const std::string t = "You help people plan meals for the week, with shopping lists and simple recipes included.....";
    REQUIRE(text::length(t) >= 50);
    const Corpus c({with_instructions("1", Platform(Platform::Kind::Poe), t),
                    with_instructions("2", Platform(Platform::Kind::Coze), t)});
    HashingEmbedder emb;
    const auto e = semantic_clone_edges(c, TextField::Instructions, emb, DetectorConfig::embedding_defaults());
    REQUIRE(e.size() == 1);
    CHECK(e[0].score == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(e[0].method == DetectorMethod::Embedding);
  }

  TEST_CASE("semantic: short texts are never embedded") {
    struct Recording : EmbeddingProvider {
      std::vector<std::string> seen;
      std::size_t dim() const override { return 4; }
      std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
        seen.insert(seen.end(), texts.begin(), texts.end());
        return std::vector<EmbeddingVector>(texts.size(), EmbeddingVector{{1, 0, 0, 0}});
      }
      bool health() override { return true; }
    } rec;
    const std::string short20 = "twenty chars exactly";
    REQUIRE(text::length(short20) == 20);
    const std::string long600(600, 'q');
    const Corpus c({with_instructions("1", Platform(Platform::Kind::Poe), short20),
                    with_instructions("2", Platform(Platform::Kind::Coze), short20),
                    with_instructions("3", Platform(Platform::Kind::Coze), long600)});
    CHECK(semantic_clone_edges(c, TextField::Instructions, rec, DetectorConfig::embedding_defaults()).empty());
    CHECK(rec.seen.empty());
  }

  TEST_CASE("semantic: each distinct text is embedded once, in batches") {
    struct Counting : EmbeddingProvider {
      std::vector<std::size_t> batches;
      HashingEmbedder inner;
      std::size_t dim() const override { return inner.dim(); }
      std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override {
        batches.push_back(texts.size());
        return inner.embed(texts);
      }
      bool health() override { return true; }
    } counting;
    const auto c = gen::random_word_corpus(4, 300);
    std::set<std::string> distinct;
    for (const auto& r : c.records()) {
      const auto n = text::length(*r.instructions);
      if (n >= 50 && n <= 512) distinct.insert(*r.instructions);
    }
    auto cfg = DetectorConfig::embedding_defaults();
    cfg.embed_batch = 7;
    semantic_clone_edges(c, TextField::Instructions, counting, cfg);
    std::size_t total = 0;
    for (auto b : counting.batches) {
      CHECK(b <= 7);
      total += b;
    }
    CHECK(total == distinct.size());
  }

  TEST_CASE("semantic: provider failures become pipeline errors") {
    struct Failing : EmbeddingProvider {
      std::size_t dim() const override { return 4; }
      std::vector<EmbeddingVector> embed(std::span<const std::string>) override {
        throw std::runtime_error("boom");
      }
      bool health() override { return false; }
    } failing;
    const auto c = gen::random_word_corpus(5, 50);
    try {
      semantic_clone_edges(c, TextField::Instructions, failing, DetectorConfig::embedding_defaults());
      FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
      CHECK(std::string(e.what()).find("embedding batch 0") != std::string::npos);
    }
  }

  TEST_CASE("semantic: a cosine of exactly 19/20 is an edge") {
    // 20 tokens in distinct buckets, one replaced: cos = 19/20 exactly, which
    // rounds to either side of 0.95 depending on the summation.
    HashingEmbedder emb;
    std::set<std::size_t> buckets;
    std::string x, y;
    for (int i = 0; buckets.size() < 21; ++i) {
      const std::string w = "tok" + std::to_string(i);
      if (!buckets.insert(emb.bucket_of(w)).second) continue;
      if (buckets.size() <= 20) x += w + " ";
      if (buckets.size() <= 19 || buckets.size() == 21) y += w + " ";
    }
    const double cos = cosine_similarity(emb.embed_one(x), emb.embed_one(y));
    CHECK(std::abs(cos - 0.95) < 1e-12);
    DetectorConfig cfg = DetectorConfig::embedding_defaults();
    cfg.min_chars = 1;
    const Corpus c({with_instructions("x", Platform(Platform::Kind::Poe), x),
                    with_instructions("y", Platform(Platform::Kind::Coze), y)});
    CHECK(semantic_clone_edges(c, TextField::Instructions, emb, cfg).size() == 1);
    cfg.threshold = Threshold(951, 1000);
    CHECK(semantic_clone_edges(c, TextField::Instructions, emb, cfg).empty());
  }

  TEST_CASE("semantic: brute-force cosine equivalence on 500 records") {
    for (std::uint64_t seed : {1u, 2u}) {
      const auto c = gen::random_word_corpus(seed, 500);
      for (bool exclude : {false, true}) {
        auto cfg = DetectorConfig::embedding_defaults();
        cfg.exclude_exact = exclude;
        cfg.embed_batch = 50;
        HashingEmbedder emb;
        const auto got = as_map(semantic_clone_edges(c, TextField::Instructions, emb, cfg));
        const auto want = brute_force_cosine(c, cfg, HashingEmbedder::kDefaultDim);
        MESSAGE("pairs decided exactly at the threshold: " << want.near_boundary);
        REQUIRE(got.size() == want.edges.size());
        for (const auto& [k, score] : want.edges) {
          REQUIRE(got.count(k));
          CHECK(std::abs(got.at(k) - score) < 1e-12);
        }
        CHECK(want.edges.size() > 50);
      }
    }
  }

  TEST_CASE("grouping") {
    auto e = [](const char* a, const char* b) {
      return make_edge(key(a), key(b), TextField::Instructions, DetectorMethod::Levenshtein, 0.96);
    };
    const std::vector<SimilarityEdge> chain{e("A", "B"), e("B", "C")};
    auto g = group_edges(chain);
    REQUIRE(g.size() == 1);
    CHECK(g[0].members == std::vector<RecordKey>{key("A"), key("B"), key("C")});
    const std::vector<SimilarityEdge> two{e("A", "B"), e("C", "D")};
    CHECK(group_edges(two).size() == 2);
    CHECK(group_edges(std::vector<SimilarityEdge>{}).empty());
    std::vector<SimilarityEdge> mixed{e("A", "B"),
                                      make_edge(key("C"), key("D"), TextField::Name, DetectorMethod::Levenshtein, 1)};
    CHECK_THROWS_AS(group_edges(mixed), ArgumentError);
  }

  TEST_CASE("random 300-edge graph: components equal BFS and form a partition") {
    std::mt19937_64 rng(300);
    for (int round = 0; round < 20; ++round) {
      std::vector<SimilarityEdge> edges;
      std::vector<std::pair<RecordKey, RecordKey>> pairs;
      std::set<std::pair<std::size_t, std::size_t>> used;
      while (edges.size() < 300) {
        std::size_t x = rng() % 400, y = rng() % 400;
        if (x == y || !used.insert({std::min(x, y), std::max(x, y)}).second) continue;
        const auto a = key("n" + std::to_string(x)), b = key("n" + std::to_string(y));
        edges.push_back(make_edge(a, b, TextField::Instructions, DetectorMethod::Embedding, 0.99));
        pairs.emplace_back(a, b);
      }
      const auto groups = group_edges(edges);
      std::set<std::set<RecordKey>> got;
      std::set<RecordKey> all;
      for (const auto& gr : groups) {
        CHECK(gr.members.size() >= 2);
        for (const auto& m : gr.members) CHECK(all.insert(m).second);  // disjoint
        got.insert(std::set<RecordKey>(gr.members.begin(), gr.members.end()));
      }
      CHECK(got == oracle::bfs_components(pairs));
      for (const auto& [a, b] : pairs) CHECK((all.count(a) && all.count(b)));
    }
  }

  TEST_CASE("disjoint set basics") {
    DisjointSet ds(5);
    CHECK(ds.unite(0, 1));
    CHECK_FALSE(ds.unite(1, 0));
    ds.unite(3, 4);
    CHECK(ds.find(0) == ds.find(1));
    CHECK(ds.find(2) != ds.find(3));
    CHECK(ds.find(3) == ds.find(4));
  }

  TEST_CASE("config validation") {
    DetectorConfig cfg;
    cfg.min_chars = 600;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
    cfg = DetectorConfig{};
    cfg.embed_batch = 0;
    CHECK_THROWS_AS(cfg.validate(), ArgumentError);
  }
}
