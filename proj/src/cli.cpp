#include "appsquat/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "appsquat/analysis.hpp"
#include "appsquat/clonedetect.hpp"
#include "appsquat/corpus.hpp"
#include "appsquat/embedding.hpp"
#include "appsquat/error.hpp"
#include "appsquat/remote_embedder.hpp"
#include "appsquat/report.hpp"
#include "appsquat/squatgen.hpp"
#include "json.hpp"

namespace appsquat {
namespace {

namespace fs = std::filesystem;

struct CommonOptions {
  std::string corpus;
  std::string input_format = "auto";
  std::string out_dir = "appsquat-out";
  std::string format = "json-lines";
  unsigned jobs = 1;
};

struct DetectOptions {
  std::string field = "instructions";
  std::string method = "levenshtein";
  std::string threshold = "0.95";
  std::size_t min_chars = 50;
  std::size_t max_chars = 512;
  bool include_exact = false;
  bool exclude_exact = false;
  std::string embedder;
  std::string endpoint;
  std::size_t embed_batch = 64;
  std::size_t embed_timeout_ms = 30'000;
  std::size_t embed_in_flight = 2;
};

struct SquatOptions {
  std::size_t top_k = 1000;
  std::string models = "all";
  std::string stoplist;
  std::string config;
  bool keep_same_developer = false;
  bool skip_identical = false;
};

struct StatsOptions {
  std::string hits;
  std::string edges = "0,1000,50000";
};

struct SampleOptions {
  std::uint64_t population = 0;
  double confidence = 0.95;
  double margin = 0.05;
  double proportion = 0.5;
  std::string out_dir;
};

std::string read_file(const fs::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(std::string("cannot open ") + what + " " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Collects reports for one run and writes them plus the manifest.
class Run {
 public:
  Run(std::string command, const std::string& out_dir, ReportFormat format)
      : dir_(out_dir), format_(format) {
    manifest_.command = std::move(command);
  }

  void config(const std::string& key, const std::string& value) { config_[key] = value; }
  void input(const std::string& label, std::string_view bytes) { inputs_[label] = sha256_hex(bytes); }
  void count(const std::string& key, std::uint64_t value) { manifest_.counts[key] = value; }

  void report(const std::string& stem, const Table& table) {
    std::ostringstream body;
    write_table(body, table, format_);
    files_.emplace_back(stem + std::string(file_extension(format_)), body.str());
  }
  void raw(const std::string& file, std::string body) { files_.emplace_back(file, std::move(body)); }

  void finish() {
    std::string cfg;
    for (const auto& [k, v] : config_) cfg += k + "=" + v + "\n";
    std::string in;
    for (const auto& [k, v] : inputs_) in += k + "=" + v + "\n";
    manifest_.config_digest = sha256_hex(cfg);
    manifest_.input_digest = sha256_hex(in);
    manifest_.timestamp = utc_timestamp_now();

    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw PipelineError("cannot create output directory " + dir_.string() + ": " + ec.message());
    files_.emplace_back("manifest.json", manifest_.to_json());
    for (const auto& [name, body] : files_) {
      std::ofstream f(dir_ / name, std::ios::binary | std::ios::trunc);
      f << body;
      if (!f) throw PipelineError("cannot write " + (dir_ / name).string());
    }
  }

 private:
  fs::path dir_;
  ReportFormat format_;
  RunManifest manifest_;
  std::map<std::string, std::string> config_;
  std::map<std::string, std::string> inputs_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::optional<InputFormat> input_format(const std::string& s) {
  if (s == "auto") return std::nullopt;
  if (s == "jsonl" || s == "json-lines") return InputFormat::JsonLines;
  if (s == "json" || s == "json-array") return InputFormat::JsonArray;
  throw ArgumentError("unknown input format '" + s + "' (expected auto, jsonl or json)");
}

LoadResult load(const CommonOptions& common, Run& run) {
  const std::string bytes = read_file(common.corpus, "corpus");
  run.input("corpus", bytes);
  run.config("input_format", common.input_format);
  auto fmt = input_format(common.input_format);
  if (!fmt) {
    const auto first = bytes.find_first_not_of(" \t\r\n\xEF\xBB\xBF");
    fmt = first != std::string::npos && bytes[first] == '[' ? InputFormat::JsonArray : InputFormat::JsonLines;
  }
  LoadResult result = load_corpus(bytes, *fmt);
  run.count("records", result.corpus.size());
  run.count("duplicates", result.duplicate_count);
  run.count("invalid_records", result.errors.size());
  return result;
}

DetectorConfig detector_config(const DetectOptions& o, DetectorMethod method, unsigned jobs, Run& run) {
  DetectorConfig cfg = method == DetectorMethod::Embedding ? DetectorConfig::embedding_defaults()
                                                           : DetectorConfig::levenshtein_defaults();
  cfg.threshold = Threshold::from_decimal(o.threshold);
  cfg.min_chars = o.min_chars;
  cfg.max_chars = o.max_chars;
  if (method == DetectorMethod::Levenshtein) cfg.exclude_exact = !o.include_exact;
  if (method == DetectorMethod::Embedding) cfg.exclude_exact = o.exclude_exact;
  cfg.jobs = jobs;
  cfg.embed_batch = o.embed_batch;
  cfg.validate();
  run.config("field", o.field);
  run.config("threshold", cfg.threshold.to_string());
  run.config("min_chars", std::to_string(cfg.min_chars));
  if (method == DetectorMethod::Embedding) run.config("max_chars", std::to_string(cfg.max_chars));
  run.config("exclude_exact", cfg.exclude_exact ? "true" : "false");
  return cfg;
}

std::unique_ptr<EmbeddingProvider> make_provider(const DetectOptions& o, Run& run) {
  std::string kind = o.embedder;
  if (kind.empty()) kind = o.endpoint.empty() ? "hashing" : "remote";
  run.config("embedder", kind);
  if (kind == "hashing") return std::make_unique<HashingEmbedder>();
  if (kind != "remote") throw ArgumentError("unknown embedder '" + kind + "' (expected hashing or remote)");
  if (o.endpoint.empty()) throw ArgumentError("--embed-endpoint is required for the remote embedder");
  RemoteEmbedderOptions ro;
  ro.endpoint = o.endpoint;
  ro.batch_size = o.embed_batch;
  ro.timeout = std::chrono::milliseconds(o.embed_timeout_ms);
  ro.max_in_flight = o.embed_in_flight;
  auto provider = std::make_unique<RemoteEmbedder>(ro);
  if (!provider->health()) throw PipelineError("embedding sidecar at " + o.endpoint + " failed its health check");
  run.config("embed_endpoint", o.endpoint);
  run.config("embed_model", provider->model());
  run.config("embed_dim", std::to_string(provider->dim()));
  return provider;
}

struct Detection {
  std::vector<SimilarityEdge> edges;
  std::vector<CloneGroup> groups;
};

Detection detect(const Corpus& corpus, const DetectOptions& o, DetectorMethod method, unsigned jobs, Run& run) {
  const TextField field = parse_field(o.field);
  run.config("method", std::string(method_name(method)));
  Detection d;
  if (method == DetectorMethod::ExactMatch) {
    run.config("field", o.field);
    d.groups = exact_match_groups(corpus, field);
    return d;
  }
  const DetectorConfig cfg = detector_config(o, method, jobs, run);
  if (method == DetectorMethod::Levenshtein) {
    d.edges = levenshtein_clone_edges(corpus, field, cfg);
  } else {
    auto provider = make_provider(o, run);
    d.edges = semantic_clone_edges(corpus, field, *provider, cfg);
  }
  d.groups = group_edges(d.edges);
  return d;
}

void count_groups(Run& run, const std::vector<CloneGroup>& groups) {
  std::uint64_t apps = 0;
  for (const auto& g : groups) apps += g.members.size();
  run.count("groups", groups.size());
  run.count("grouped_apps", apps);
}

void add_common(CLI::App* sub, CommonOptions& o, bool needs_corpus = true) {
  if (needs_corpus) {
    sub->add_option("--corpus", o.corpus, "Metadata dump (json-lines or json array)")->required();
    sub->add_option("--input-format", o.input_format, "auto, jsonl or json")->capture_default_str();
  }
  sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--format", o.format, "Report format: json-lines or csv")->capture_default_str();
  sub->add_option("--jobs", o.jobs, "Worker threads for pair scoring")->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_detector(CLI::App* sub, DetectOptions& o, bool lev, bool sem) {
  sub->add_option("--field", o.field, "name, description or instructions")->capture_default_str();
  if (!lev && !sem) return;
  sub->add_option("--threshold", o.threshold, "Similarity threshold in (0, 1]")->capture_default_str();
  sub->add_option("--min-chars", o.min_chars, "Skip texts shorter than this (code points)")->capture_default_str();
  if (lev) sub->add_flag("--include-exact", o.include_exact, "Keep identical pairs (Levenshtein)");
  if (sem) {
    sub->add_option("--max-chars", o.max_chars, "Skip texts longer than this (embedding)")->capture_default_str();
    sub->add_flag("--exclude-exact", o.exclude_exact, "Drop identical pairs (embedding)");
    sub->add_option("--embedder", o.embedder, "hashing or remote (default: remote iff an endpoint is given)");
    sub->add_option("--embed-endpoint", o.endpoint, "Sidecar base URL, e.g. http://127.0.0.1:8000");
    sub->add_option("--embed-batch", o.embed_batch, "Texts per embedding request")->capture_default_str();
    sub->add_option("--embed-timeout-ms", o.embed_timeout_ms, "Per-request timeout")->capture_default_str();
    sub->add_option("--embed-in-flight", o.embed_in_flight, "Concurrent embedding requests")->capture_default_str();
  }
}

int cmd_ingest(const CommonOptions& c, const std::string& stoplist_path, std::ostream& out) {
  Run run("ingest", c.out_dir, parse_report_format(c.format));
  LoadResult loaded = load(c, run);
  Corpus corpus = loaded.corpus;
  if (!stoplist_path.empty()) {
    const std::string bytes = read_file(stoplist_path, "stoplist");
    run.input("stoplist", bytes);
    std::istringstream in(bytes);
    corpus = filter_common_names(corpus, StopNameList::parse(in));
    run.count("stoplisted", loaded.corpus.size() - corpus.size());
  }
  std::ostringstream body;
  write_corpus(body, corpus);
  run.raw("corpus.jsonl", body.str());
  run.report("record_errors", record_errors_table(loaded.errors));
  run.count("written", corpus.size());
  run.finish();
  out << "records=" << corpus.size() << " duplicates=" << loaded.duplicate_count
      << " invalid=" << loaded.errors.size() << '\n';
  return kExitOk;
}

int cmd_squat(const CommonOptions& c, const SquatOptions& s, std::ostream& out) {
  Run run("squat", c.out_dir, parse_report_format(c.format));
  LoadResult loaded = load(c, run);
  const Corpus& corpus = loaded.corpus;

  SquatGenConfig gen = SquatGenConfig::defaults();
  if (!s.config.empty()) {
    const std::string bytes = read_file(s.config, "squatgen config");
    run.input("squatgen_config", bytes);
    std::istringstream in(bytes);
    gen = load_squatgen_config(in);
  }
  gen.validate();
  const ModelSet models = ModelSet::parse(s.models);
  if (s.top_k == 0) throw ArgumentError("--targets-top-k must be >= 1");
  run.config("models", s.models);
  run.config("targets_top_k", std::to_string(s.top_k));
  run.config("keep_same_developer", s.keep_same_developer ? "true" : "false");
  run.config("identical_names", s.skip_identical ? "false" : "true");

  Corpus target_pool = corpus;
  if (!s.stoplist.empty()) {
    const std::string bytes = read_file(s.stoplist, "stoplist");
    run.input("stoplist", bytes);
    std::istringstream in(bytes);
    target_pool = filter_common_names(corpus, StopNameList::parse(in));
  }
  const std::vector<AppRecord> targets = top_ranked(target_pool, s.top_k);
  const TargetMap target_map = make_target_map(targets);

  std::vector<Variant> variants;
  for (const auto& [name, _] : target_map) {
    auto v = generate_variants(name, models, gen);
    variants.insert(variants.end(), std::make_move_iterator(v.begin()), std::make_move_iterator(v.end()));
  }
  std::vector<SquatHit> hits = match_variants(variants, corpus, target_map);
  std::vector<SquatHit> identical;
  if (!s.skip_identical) identical = find_identical_names(targets, corpus);
  const std::size_t raw = hits.size() + identical.size();
  if (!s.keep_same_developer) {
    hits = filter_same_developer(std::move(hits));
    identical = filter_same_developer(std::move(identical));
  }
  run.count("targets", targets.size());
  run.count("variants", variants.size());
  run.count("squat_hits", hits.size());
  run.count("identical_name_hits", identical.size());
  run.count("same_developer_removed", raw - hits.size() - identical.size());

  hits.insert(hits.end(), std::make_move_iterator(identical.begin()), std::make_move_iterator(identical.end()));
  sort_hits(hits);
  std::set<RecordKey> distinct;
  for (const auto& h : hits) distinct.insert(h.matched.key());
  run.count("hits", hits.size());
  run.count("distinct_matched_apps", distinct.size());

  run.report("hits", hits_table(hits));
  run.report("rank_targeting", rank_table(rank_targeting(hits)));
  run.finish();
  out << "targets=" << targets.size() << " variants=" << variants.size() << " hits=" << hits.size()
      << " distinct_apps=" << distinct.size() << '\n';
  return kExitOk;
}

int cmd_clone(const CommonOptions& c, const DetectOptions& d, DetectorMethod method, const char* name,
              std::ostream& out) {
  Run run(name, c.out_dir, parse_report_format(c.format));
  LoadResult loaded = load(c, run);
  Detection det = detect(loaded.corpus, d, method, c.jobs, run);
  if (method != DetectorMethod::ExactMatch) {
    run.report("edges", edges_table(det.edges));
    run.count("edges", det.edges.size());
  }
  run.report("groups", groups_table(det.groups));
  count_groups(run, det.groups);
  run.finish();
  if (method != DetectorMethod::ExactMatch) out << "edges=" << det.edges.size() << ' ';
  out << "groups=" << det.groups.size() << '\n';
  return kExitOk;
}

int cmd_crossplat(const CommonOptions& c, const DetectOptions& d, std::ostream& out) {
  Run run("crossplat", c.out_dir, parse_report_format(c.format));
  LoadResult loaded = load(c, run);
  const DetectorMethod method = parse_method(d.method);
  Detection det = detect(loaded.corpus, d, method, c.jobs, run);
  const CrossPlatformMatrix matrix = cross_platform_matrix(det.groups, loaded.corpus);
  const auto notes = flag_same_author_cross_platform(det.groups, loaded.corpus);

  std::uint64_t cross = 0, flagged = 0;
  for (const auto& n : notes) {
    if (n.platform_count >= 2) ++cross;
    if (n.likely_legitimate_cross_post) ++flagged;
  }
  count_groups(run, det.groups);
  run.count("cross_platform_groups", cross);
  run.count("likely_legitimate_cross_posts", flagged);
  run.report("groups", groups_table(det.groups));
  run.report("matrix", matrix_table(matrix));
  run.report("group_flags", group_flags_table(notes));
  run.finish();
  out << "groups=" << det.groups.size() << " cross_platform=" << cross << " flagged=" << flagged << '\n';
  return kExitOk;
}

int cmd_stats(const CommonOptions& c, const StatsOptions& s, std::ostream& out) {
  Run run("stats", c.out_dir, parse_report_format(c.format));
  LoadResult loaded = load(c, run);
  const Corpus& corpus = loaded.corpus;
  const HistogramSpec spec = HistogramSpec::parse(s.edges);
  run.config("edges", s.edges);

  std::vector<AppRecord> population;
  if (s.hits.empty()) {
    population.assign(corpus.records().begin(), corpus.records().end());
  } else {
    const std::string bytes = read_file(s.hits, "hit report");
    run.input("hits", bytes);
    std::istringstream in(bytes);
    std::set<RecordKey> seen;
    std::vector<SquatHit> hits;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json row;
      try {
        row = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error&) {
        throw ValidationError("hit report line " + std::to_string(line_no) + " is not JSON");
      }
      auto resolve = [&](const char* platform, const char* id) -> const AppRecord& {
        RecordKey key{Platform::parse(row.at(platform).get<std::string>()), row.at(id).get<std::string>()};
        const AppRecord* rec = corpus.find(key);
        if (!rec) throw ValidationError("hit report references " + to_string(key) + " which is not in the corpus");
        return *rec;
      };
      try {
        const AppRecord& matched = resolve("matched_platform", "matched_id");
        const AppRecord& target = resolve("target_platform", "target_id");
        if (seen.insert(matched.key()).second) population.push_back(matched);
        SquatHit h;
        h.matched = matched;
        h.target = target;
        hits.push_back(std::move(h));
      } catch (const nlohmann::json::exception&) {
        throw ValidationError("hit report line " + std::to_string(line_no) + " lacks required fields");
      }
    }
    run.count("hits", hits.size());
    run.report("rank_targeting", rank_table(rank_targeting(hits)));
  }

  const EngagementHistogram h = engagement_histogram(population, spec);
  run.count("population", population.size());
  run.count("unknown_engagement", h.unknown);
  run.report("engagement", histogram_table(h, spec));
  run.report("max_engagement", max_engagement_table(h));
  run.finish();
  for (std::size_t i = 0; i < h.counts.size(); ++i) out << spec.label(i) << '=' << h.counts[i] << ' ';
  out << "unknown=" << h.unknown << '\n';
  return kExitOk;
}

int cmd_sample_size(const SampleOptions& s, std::ostream& out) {
  const std::uint64_t n = sample_size(s.population, s.confidence, s.margin, s.proportion);
  out << n << '\n';
  if (!s.out_dir.empty()) {
    Run run("sample-size", s.out_dir, ReportFormat::JsonLines);
    run.config("population", std::to_string(s.population));
    std::ostringstream params;
    params.precision(17);
    params << s.confidence << ' ' << s.margin << ' ' << s.proportion;
    run.config("parameters", params.str());
    run.count("sample_size", n);
    run.finish();
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squatting and cloning detection for LLM app store metadata", "appsquat"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  CommonOptions common;
  DetectOptions detect_opts;
  SquatOptions squat_opts;
  StatsOptions stats_opts;
  SampleOptions sample_opts;
  std::string ingest_stoplist;

  auto* ingest = app.add_subcommand("ingest", "Validate, normalize and deduplicate a metadata dump");
  add_common(ingest, common);
  ingest->add_option("--stoplist", ingest_stoplist, "Drop records whose names are on this list");

  auto* squat = app.add_subcommand("squat", "Generate name variants of top apps and match them");
  add_common(squat, common);
  squat->add_option("--targets-top-k", squat_opts.top_k, "Targets: the k best-ranked apps")->capture_default_str();
  squat->add_option("--models", squat_opts.models, "Comma-separated model names or 'all'")->capture_default_str();
  squat->add_option("--stoplist", squat_opts.stoplist, "Common names excluded from the targets");
  squat->add_option("--config", squat_opts.config, "JSON file overriding generator lexicons and sets");
  squat->add_flag("--keep-same-developer", squat_opts.keep_same_developer, "Keep hits by the target's own author");
  squat->add_flag("--no-identical", squat_opts.skip_identical, "Skip identical-name duplicates");

  auto* exact = app.add_subcommand("clone-exact", "Group apps with byte-identical text fields");
  add_common(exact, common);
  add_detector(exact, detect_opts, false, false);

  auto* lev = app.add_subcommand("clone-lev", "Near-duplicate detection by Levenshtein similarity");
  add_common(lev, common);
  add_detector(lev, detect_opts, true, false);

  auto* sem = app.add_subcommand("clone-sem", "Near-duplicate detection by embedding cosine similarity");
  add_common(sem, common);
  add_detector(sem, detect_opts, false, true);

  auto* cross = app.add_subcommand("crossplat", "Cross-platform clone matrix and same-author flags");
  add_common(cross, common);
  add_detector(cross, detect_opts, true, true);
  cross->add_option("--method", detect_opts.method, "exact, levenshtein or embedding")->capture_default_str();

  auto* stats = app.add_subcommand("stats", "Engagement histogram and rank targeting");
  add_common(stats, common);
  stats->add_option("--hits", stats_opts.hits, "Hit report (json-lines) restricting the population");
  stats->add_option("--edges", stats_opts.edges, "Histogram bucket edges")->capture_default_str();

  auto* sample = app.add_subcommand("sample-size", "Cochran sample size with finite population correction");
  sample->add_option("--population", sample_opts.population, "Population size")->required()
      ->check(CLI::PositiveNumber);
  sample->add_option("--confidence", sample_opts.confidence, "Confidence level")->capture_default_str();
  sample->add_option("--margin", sample_opts.margin, "Margin of error")->capture_default_str();
  sample->add_option("--proportion", sample_opts.proportion, "Expected proportion")->capture_default_str();
  sample->add_option("--out", sample_opts.out_dir, "Also write a manifest here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (ingest->parsed()) return cmd_ingest(common, ingest_stoplist, out);
    if (squat->parsed()) return cmd_squat(common, squat_opts, out);
    if (exact->parsed()) return cmd_clone(common, detect_opts, DetectorMethod::ExactMatch, "clone-exact", out);
    if (lev->parsed()) return cmd_clone(common, detect_opts, DetectorMethod::Levenshtein, "clone-lev", out);
    if (sem->parsed()) return cmd_clone(common, detect_opts, DetectorMethod::Embedding, "clone-sem", out);
    if (cross->parsed()) return cmd_crossplat(common, detect_opts, out);
    if (stats->parsed()) return cmd_stats(common, stats_opts, out);
    if (sample->parsed()) return cmd_sample_size(sample_opts, out);
  } catch (const PipelineError& e) {
    err << "pipeline error: " << e.what() << '\n';
    return kExitPipeline;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DecodeError& e) {
    err << "decode error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "pipeline error: " << e.what() << '\n';
    return kExitPipeline;
  }
  err << app.help();
  return kExitValidation;
}

}  // namespace appsquat
