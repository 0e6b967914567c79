// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria. Tolerances and time limits are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <unistd.h>

#include "appsquat/analysis.hpp"
#include "appsquat/cli.hpp"
#include "appsquat/clonedetect.hpp"
#include "appsquat/embedding.hpp"
#include "appsquat/levenshtein.hpp"
#include "appsquat/squatgen.hpp"
#include "appsquat/text.hpp"
#include "generators.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace appsquat;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kSampleSizeMaxMs = 1.0;
constexpr double kPlantedMaxSeconds = 10.0;
constexpr double kCosineTolerance = 1e-9;
constexpr double kScoreTolerance = 1e-12;
constexpr int kLevCorpora = 50;
constexpr std::size_t kLevRecords = 2000;
constexpr int kMetricTriples = 100000;
constexpr int kBfsEdgeSets = 100;
constexpr int kMatrixGroups = 30;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct Outcome {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

int failures = 0;

void criterion(const std::string& id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  char elapsed[32];
  std::snprintf(elapsed, sizeof elapsed, "%.2fs", ms_since(t0) / 1000.0);
  if (!o.ok) ++failures;
  std::cout << (o.ok ? "PASS " : "FAIL ") << id << "  " << title << "  [" << elapsed;
  if (!o.detail.empty()) std::cout << "; " << o.detail;
  std::cout << "]" << std::endl;
}

// --------------------------------------------------------------------------

Outcome sample_sizes() {
  Outcome o;
  for (auto [population, expected] : std::initializer_list<std::pair<std::uint64_t, std::uint64_t>>{
           {3509, 347}, {9575, 370}}) {
    std::vector<double> times;
    std::uint64_t got = 0;
    for (int rep = 0; rep < 101; ++rep) {
      const auto t0 = Clock::now();
      got = sample_size(population, 0.95, 0.05, 0.5);
      times.push_back(ms_since(t0));
    }
    std::nth_element(times.begin(), times.begin() + 50, times.end());
    const double median = times[50];
    o.require(got == expected, "sample_size(" + std::to_string(population) + ") = " + std::to_string(got));
    o.require(median < kSampleSizeMaxMs, "median time " + std::to_string(median) + " ms");
    o.detail += (o.detail.empty() ? "" : ", ") + std::to_string(population) + "->" + std::to_string(got);
  }
  return o;
}

Outcome dalle_variants() {
  Outcome o;
  std::set<std::string> all;
  for (const auto& v : generate_variants("DALL·E", ModelSet::all())) all.insert(v.variant);
  const std::vector<std::string> named{"dall·e", "DALLE", "DALL-E", "DALL·E1", "DALL·E+", "DALL·E pro", "E·DALL"};
  for (const auto& n : named) o.require(all.count(n) == 1, "missing " + n);
  bool emoji = false;
  for (const auto& e : SquatGenConfig::defaults().emoji_set) emoji = emoji || all.count("DALL·E" + e);
  o.require(emoji, "missing DALL·E followed by an emoji");
  o.detail = std::to_string(all.size()) + " distinct variants";
  return o;
}

Outcome planted_recall() {
  Outcome o;
  const auto planted = gen::planted_squat_corpus(42, 10000, 20, 200, 0);
  std::set<SquatModel> models;
  for (const auto& t : planted.truth) models.insert(t.model);
  o.require(models.size() == kSquatModelCount, "planting covers only " + std::to_string(models.size()) + " models");
  std::set<std::string> authors;
  for (const auto& r : planted.corpus.records()) {
    if (r.author && r.id.rfind("p-", 0) == 0) authors.insert(*r.author);
  }
  o.require(authors.size() == 200, "planted authors are not distinct");

  const fs::path dir = fs::temp_directory_path() / ("appsquat-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "corpus.jsonl", std::ios::binary);
    write_corpus(f, planted.corpus);
  }
  std::ostringstream out, err;
  const auto t0 = Clock::now();
  const int code = run_cli({"squat", "--corpus", (dir / "corpus.jsonl").string(), "--targets-top-k", "20",
                            "--models", "all", "--out", (dir / "out").string()},
                           out, err);
  const double seconds = ms_since(t0) / 1000.0;
  o.require(code == 0, "squat exited " + std::to_string(code) + ": " + err.str());

  std::set<std::tuple<std::string, std::string, std::string, std::string>> got, want;
  std::ifstream hits(dir / "out" / "hits.jsonl");
  std::size_t rows = 0;
  for (std::string line; std::getline(hits, line);) {
    const auto j = nlohmann::json::parse(line);
    got.insert({j.at("target_name").get<std::string>(), j.at("model").get<std::string>(),
                j.at("matched_platform").get<std::string>(), j.at("matched_id").get<std::string>()});
    ++rows;
  }
  for (const auto& t : planted.truth) {
    want.insert({t.target_name, std::string(model_name(t.model)), t.matched.platform.name(), t.matched.id});
  }
  std::size_t false_positives = 0, found = 0;
  for (const auto& g : got) (want.count(g) ? found : false_positives) += 1;
  o.require(rows == 200, std::to_string(rows) + " hit rows");
  o.require(found == 200, std::to_string(found) + " of 200 planted hits found with the right tag");
  o.require(false_positives == 0, std::to_string(false_positives) + " false positives");
  o.require(seconds < kPlantedMaxSeconds, "took " + std::to_string(seconds) + " s");
  fs::remove_all(dir);
  if (o.ok) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "200/200 hits, 0 false positives, 14 models, pipeline %.2fs", seconds);
    o.detail = buf;
  }
  return o;
}

Outcome levenshtein_equivalence() {
  Outcome o;
  std::size_t total_edges = 0;
  static const std::pair<std::uint64_t, std::uint64_t> thresholds[] = {{19, 20}, {9, 10}, {17, 20}, {4, 5}};
  for (int c = 0; c < kLevCorpora && o.ok; ++c) {
    const auto corpus = gen::random_text_corpus(1000 + c, kLevRecords, 12, 40, 60, 280);
    const auto [num, den] = thresholds[c % 4];
    DetectorConfig cfg;
    cfg.threshold = Threshold(num, den);
    cfg.min_chars = 12 + c % 3;
    cfg.exclude_exact = c % 2 == 0;
    const auto edges = levenshtein_clone_edges(corpus, TextField::Instructions, cfg);
    const auto expected =
        oracle::brute_force_levenshtein(corpus, TextField::Instructions, num, den, cfg.min_chars, cfg.exclude_exact);
    std::set<oracle::EdgeKey> got;
    for (const auto& e : edges) {
      o.require(got.insert({e.a, e.b}).second, "duplicate edge in corpus " + std::to_string(c));
      o.require(e.a < e.b, "non-canonical edge in corpus " + std::to_string(c));
      auto it = expected.find({e.a, e.b});
      if (it == expected.end()) continue;
      const double len = static_cast<double>(std::max(text::length(*corpus.find(e.a)->instructions),
                                                      text::length(*corpus.find(e.b)->instructions)));
      o.require(std::abs(e.score - (1.0 - static_cast<double>(it->second) / len)) < kScoreTolerance,
                "score mismatch in corpus " + std::to_string(c));
    }
    std::set<oracle::EdgeKey> want;
    for (const auto& [k, _] : expected) want.insert(k);
    o.require(got == want, "edge sets differ in corpus " + std::to_string(c) + " (" + std::to_string(got.size()) +
                               " vs " + std::to_string(want.size()) + ")");
    total_edges += want.size();
  }

  std::mt19937_64 rng(77);
  const std::u32string alphabet = U"abcdé·🙂";
  auto random_string = [&] {
    std::u32string s;
    const std::size_t len = rng() % 16;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  int violations = 0;
  for (int i = 0; i < kMetricTriples; ++i) {
    const auto a = random_string(), b = random_string(), c = random_string();
    const auto ab = levenshtein_distance(a, b), ba = levenshtein_distance(b, a);
    const auto ac = levenshtein_distance(a, c), bc = levenshtein_distance(b, c);
    if ((ab == 0) != (a == b) || ab != ba || ac > ab + bc || ab > std::max(a.size(), b.size())) ++violations;
    if (i % 100 == 0 && ab != oracle::edit_distance(a, b)) ++violations;
  }
  o.require(violations == 0, std::to_string(violations) + " metric-axiom violations");
  if (o.ok) {
    o.detail = std::to_string(kLevCorpora) + " corpora x " + std::to_string(kLevRecords) + " records, " +
               std::to_string(total_edges) + " edges equal; " + std::to_string(kMetricTriples) + " triples";
  }
  return o;
}

Outcome boundary() {
  Outcome o;
  std::mt19937_64 rng(2500);
  std::u32string base;
  for (int i = 0; i < 500; ++i) base += U'a' + static_cast<char32_t>(rng() % 26);
  const Threshold t(19, 20);
  for (std::size_t edits : {24u, 25u, 26u}) {
    std::u32string v = base;
    for (std::size_t i = 0; i < edits; ++i) v[i * 19] = U'#';
    const auto d = levenshtein_distance(base, v);
    o.require(d == edits && oracle::edit_distance(base, v) == edits, "distance " + std::to_string(d));
    const bool flagged_rational = d * t.denominator() <= (t.denominator() - t.numerator()) * 500;
    o.require(t.admits(d, 500) == flagged_rational, "admits disagrees with the rational test");

    AppRecord a = gen::record("a", Platform(Platform::Kind::Poe), "A");
    AppRecord b = gen::record("b", Platform(Platform::Kind::Coze), "B");
    a.instructions = text::to_utf8(base);
    b.instructions = text::to_utf8(v);
    DetectorConfig cfg;
    cfg.threshold = Threshold::from_decimal("0.95");
    const auto edges = levenshtein_clone_edges(Corpus({a, b}), TextField::Instructions, cfg);
    const bool should_flag = edits <= 25;
    o.require(edges.size() == (should_flag ? 1u : 0u),
              std::to_string(edits) + " edits: " + std::to_string(edges.size()) + " edges");
  }
  if (o.ok) o.detail = "24 and 25 edits flagged (25/500 = 1/20 exactly), 26 not";
  return o;
}

Outcome semantic() {
  Outcome o;
  HashingEmbedder emb;
  std::mt19937_64 rng(6);
  const std::vector<std::string> words{"write", "story", "code", "image", "café", "日本", "ai", "pro", "tutor"};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::string> tokens;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 40); ++k) tokens.push_back(words[rng() % words.size()]);
    auto shuffled = tokens;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    std::string x, y;
    for (const auto& w : tokens) x += w + " ";
    for (const auto& w : shuffled) y += (rng() % 2 ? w : text::casefold(w)) + (rng() % 2 ? ", " : " ");
    worst = std::max(worst, std::abs(cosine_similarity(emb.embed_one(x), emb.embed_one(y)) - 1.0));
  }
  o.require(worst <= kCosineTolerance, "same-multiset cosine off by " + std::to_string(worst));

  std::size_t edges_total = 0, boundary_pairs = 0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const auto corpus = gen::random_word_corpus(seed, 500);
    auto cfg = DetectorConfig::embedding_defaults();
    cfg.exclude_exact = seed % 2 == 0;
    const auto edges = semantic_clone_edges(corpus, TextField::Instructions, emb, cfg);
    std::map<oracle::EdgeKey, double> got;
    for (const auto& e : edges) got[{e.a, e.b}] = e.score;
    // Oracle: every eligible pair, independent long-double cosine.
    std::vector<const AppRecord*> eligible;
    for (const auto& r : corpus.records()) {
      const auto n = text::to_u32(*r.instructions).size();
      if (n >= cfg.min_chars && n <= cfg.max_chars) eligible.push_back(&r);
    }
    std::size_t want = 0;
    for (std::size_t i = 0; i < eligible.size(); ++i) {
      const auto u = emb.embed_one(*eligible[i]->instructions).values;
      for (std::size_t j = i + 1; j < eligible.size(); ++j) {
        if (cfg.exclude_exact && *eligible[i]->instructions == *eligible[j]->instructions) continue;
        const double cos = oracle::cosine(u, emb.embed_one(*eligible[j]->instructions).values);
        RecordKey a = eligible[i]->key(), b = eligible[j]->key();
        if (b < a) std::swap(a, b);
        bool edge = cos >= cfg.threshold.value();
        if (std::abs(cos - cfg.threshold.value()) < 1e-9) {
          edge = oracle::exact_cosine_admits(emb, *eligible[i]->instructions, *eligible[j]->instructions, cfg.threshold);
          ++boundary_pairs;
        }
        auto it = got.find({a, b});
        if (edge) {
          ++want;
          o.require(it != got.end(), "missing semantic edge " + to_string(a) + " " + to_string(b));
          if (it != got.end()) o.require(std::abs(it->second - cos) < kScoreTolerance, "score mismatch");
        } else {
          o.require(it == got.end(), "extra semantic edge " + to_string(a) + " " + to_string(b));
        }
      }
    }
    o.require(got.size() == want, "edge counts differ");
    edges_total += want;
  }
  if (o.ok) o.detail = "3 corpora x 500 records, " + std::to_string(edges_total) + " edges (" + std::to_string(boundary_pairs) +
                      " decided exactly at the threshold); built-in embedder, no sidecar";
  return o;
}

Outcome grouping() {
  Outcome o;
  std::mt19937_64 rng(100);
  const Platform poe(Platform::Kind::Poe);
  for (int s = 0; s < kBfsEdgeSets; ++s) {
    const std::size_t nodes = 10 + rng() % 400;
    const std::size_t m = rng() % 400;
    std::vector<SimilarityEdge> edges;
    std::vector<std::pair<RecordKey, RecordKey>> pairs;
    for (std::size_t i = 0; i < m; ++i) {
      const auto x = rng() % nodes, y = rng() % nodes;
      if (x == y) continue;
      RecordKey a{poe, "n" + std::to_string(x)}, b{poe, "n" + std::to_string(y)};
      edges.push_back(make_edge(a, b, TextField::Instructions, DetectorMethod::Levenshtein, 0.97));
      pairs.emplace_back(a, b);
    }
    std::set<std::set<RecordKey>> got;
    for (const auto& g : group_edges(edges)) got.insert({g.members.begin(), g.members.end()});
    o.require(got == oracle::bfs_components(pairs), "components differ on edge set " + std::to_string(s));
  }

  // Hand-enumerated platform spreads: group i spans the platforms listed.
  const auto& P = gen::platforms();  // GPTStore FlowGPT Poe Coze Cici CharacterAI
  std::vector<std::vector<int>> spreads;
  for (int i = 0; i < kMatrixGroups; ++i) {
    switch (i % 6) {
      case 0: spreads.push_back({1, 2}); break;                        // FlowGPT, Poe
      case 1: spreads.push_back({0, 0, 0}); break;                      // GPTStore only
      case 2: spreads.push_back({1, 2, 3}); break;                      // FlowGPT, Poe, Coze
      case 3: spreads.push_back({4, 5, 4}); break;                      // Cici, CharacterAI
      case 4: spreads.push_back({0, 1, 2, 3, 4, 5}); break;             // all six
      case 5: spreads.push_back({3, 3}); break;                         // Coze only
    }
  }
  // Five groups of each kind. Expected cells, counted by hand:
  //   (FlowGPT,Poe): 5 + 5 + 5 = 15      (GPTStore,GPTStore): 5
  //   (FlowGPT,Coze), (Poe,Coze): 5 + 5 = 10 each
  //   (Cici,CharacterAI): 5 + 5 = 10      (Coze,Coze): 5
  //   every other off-diagonal pair among the six: 5 (from the all-six groups)
  std::map<std::pair<int, int>, std::uint64_t> expected;
  for (int a = 0; a < 6; ++a) {
    for (int b = a + 1; b < 6; ++b) expected[{a, b}] = 5;
  }
  expected[{1, 2}] = 15;
  expected[{1, 3}] = 10;
  expected[{2, 3}] = 10;
  expected[{4, 5}] = 10;
  expected[{0, 0}] = 5;
  expected[{3, 3}] = 5;

  std::vector<AppRecord> recs;
  std::vector<CloneGroup> groups;
  for (std::size_t g = 0; g < spreads.size(); ++g) {
    CloneGroup group{{}, TextField::Instructions, DetectorMethod::Embedding};
    for (std::size_t k = 0; k < spreads[g].size(); ++k) {
      recs.push_back(gen::record("g" + std::to_string(g) + "m" + std::to_string(k), P[spreads[g][k]], "x"));
      group.members.push_back(recs.back().key());
    }
    std::sort(group.members.begin(), group.members.end());
    groups.push_back(group);
  }
  const auto matrix = cross_platform_matrix(groups, Corpus(recs));
  for (int a = 0; a < 6; ++a) {
    for (int b = 0; b < 6; ++b) {
      const auto key = std::pair{std::min(a, b), std::max(a, b)};
      const std::uint64_t want = expected.count(key) ? expected.at(key) : 0;
      o.require(matrix.at(P[a], P[b]) == want,
                "cell (" + P[a].name() + "," + P[b].name() + ") = " + std::to_string(matrix.at(P[a], P[b])) +
                    ", expected " + std::to_string(want));
      o.require(matrix.at(P[a], P[b]) == matrix.at(P[b], P[a]), "matrix not symmetric");
    }
  }
  if (o.ok) o.detail = "100 edge sets match BFS; 30-group matrix matches, symmetric";
  return o;
}

Outcome histogram() {
  Outcome o;
  std::vector<AppRecord> recs;
  for (auto [id, n] : std::initializer_list<std::pair<const char*, std::uint64_t>>{
           {"a", 12969368}, {"b", 4236464}, {"c", 500}, {"d", 1000}, {"e", 1001}, {"f", 50000}, {"g", 50001}}) {
    recs.push_back(gen::record(id, Platform(Platform::Kind::GPTStore), id));
    recs.back().conversation_count = n;
  }
  recs.push_back(gen::record("u", Platform(Platform::Kind::Poe), "u"));
  const HistogramSpec spec({0, 1000, 50000});
  o.require(spec.bucket_of(12969368) == 2u && spec.bucket_of(4236464) == 2u, "headline values not in >50000");
  const auto h = engagement_histogram(recs, spec);
  o.require(h.counts == std::vector<std::uint64_t>{2, 2, 3}, "bucket counts");
  o.require(h.unknown == 1 && h.below_range == 0, "unknown/below-range counts");
  o.require(h.total() == recs.size(), "counts do not sum to the input size");
  o.require(h.max_record && h.max_record->conversation_count == 12969368u, "maximum record");
  if (o.ok) o.detail = "0-1000:2 1001-50000:2 >50000:3 unknown:1, max 12969368";
  return o;
}

}  // namespace

int main() {
  criterion("sample-size", "Cochran sample size reproduces 347 and 370 in under 1 ms", sample_sizes);
  criterion("dalle-variants", "all eight named DALL·E transformations are generated", dalle_variants);
  criterion("planted-recall", "10,000-record planted corpus: exactly the 200 planted hits, correct tags, < 10 s",
            planted_recall);
  criterion("levenshtein-oracle", "pruned clone edges equal brute force on 50 x 2,000 records; metric axioms",
            levenshtein_equivalence);
  criterion("boundary", "500-char pair: 24 and 25 edits flagged under inclusive 0.95", boundary);
  criterion("semantic", "token-multiset cosine 1 +- 1e-9; brute-force cosine equivalence on 500 records", semantic);
  criterion("grouping", "components equal BFS on 100 edge sets; 30-group matrix by hand; symmetric", grouping);
  criterion("histogram", "engagement buckets for 12,969,368 and 4,236,464 under edges [0, 1000, 50000]", histogram);
  return failures;
}
