#include "appsquat/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>

#include <openssl/evp.h>

#include "appsquat/error.hpp"
#include "json.hpp"

namespace appsquat {
namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out.push_back(sep);
    out += items[i];
  }
  return out;
}

std::string json_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return "null"; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return nlohmann::json(s).dump(); }
    std::string operator()(Fixed6 f) const { return fixed6(f.value); }
    std::string operator()(const std::vector<std::string>& v) const { return nlohmann::json(v).dump(); }
  };
  return std::visit(Visitor{}, cell);
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_cell(const Cell& cell) {
  struct Visitor {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(std::int64_t v) const { return std::to_string(v); }
    std::string operator()(std::uint64_t v) const { return std::to_string(v); }
    std::string operator()(const std::string& s) const { return csv_quote(s); }
    std::string operator()(Fixed6 f) const { return fixed6(f.value); }
    std::string operator()(const std::vector<std::string>& v) const { return csv_quote(join(v, ';')); }
  };
  return std::visit(Visitor{}, cell);
}

Cell opt_string(const std::optional<std::string>& s) {
  if (!s) return std::monostate{};
  return *s;
}

std::uint64_t u64(std::size_t v) { return static_cast<std::uint64_t>(v); }

}  // namespace

ReportFormat parse_report_format(std::string_view s) {
  if (s == "json-lines" || s == "jsonl" || s == "json") return ReportFormat::JsonLines;
  if (s == "csv") return ReportFormat::Csv;
  throw ArgumentError("unknown report format '" + std::string(s) + "' (expected json-lines or csv)");
}

std::string_view file_extension(ReportFormat f) { return f == ReportFormat::Csv ? ".csv" : ".jsonl"; }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw ArgumentError("report row width does not match header");
  rows_.push_back(std::move(row));
}

void write_table(std::ostream& out, const Table& table, ReportFormat format) {
  const auto& cols = table.columns();
  if (format == ReportFormat::Csv) {
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << csv_quote(cols[i]);
    out << '\n';
    for (const auto& row : table.rows()) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
      out << '\n';
    }
    return;
  }
  for (const auto& row : table.rows()) {
    out << '{';
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << nlohmann::json(cols[i]).dump() << ':' << json_cell(row[i]);
    }
    out << "}\n";
  }
}

std::string member_label(const RecordKey& key) { return to_string(key); }

Table hits_table(std::span<const SquatHit> hits) {
  Table t({"target_id", "target_platform", "target_name", "variant", "model", "matched_platform",
           "matched_id", "matched_name", "same_developer"});
  for (const auto& h : hits) {
    t.add_row({h.target.id, h.target.platform.name(), h.target.name, h.variant, std::string(h.tag()),
               h.matched.platform.name(), h.matched.id, h.matched.name, h.same_developer});
  }
  return t;
}

Table edges_table(std::span<const SimilarityEdge> edges) {
  Table t({"a_platform", "a_id", "b_platform", "b_id", "field", "method", "score"});
  for (const auto& e : edges) {
    t.add_row({e.a.platform.name(), e.a.id, e.b.platform.name(), e.b.id, std::string(field_name(e.field)),
               std::string(method_name(e.method)), Fixed6{e.score}});
  }
  return t;
}

Table groups_table(std::span<const CloneGroup> groups) {
  Table t({"group_id", "method", "field", "members"});
  for (std::size_t i = 0; i < groups.size(); ++i) {
    std::vector<std::string> members;
    for (const auto& m : groups[i].members) members.push_back(member_label(m));
    t.add_row({u64(i + 1), std::string(method_name(groups[i].method)), std::string(field_name(groups[i].field)),
               std::move(members)});
  }
  return t;
}

Table group_flags_table(std::span<const GroupAnnotation> notes) {
  Table t({"group_id", "platform_count", "shared_author", "likely_legitimate_cross_post"});
  for (const auto& n : notes) {
    t.add_row({u64(n.group_index + 1), u64(n.platform_count), opt_string(n.shared_author),
               n.likely_legitimate_cross_post});
  }
  return t;
}

Table matrix_table(const CrossPlatformMatrix& matrix) {
  Table t({"platform_a", "platform_b", "count"});
  for (const auto& [cell, count] : matrix.cells()) {
    t.add_row({cell.first.name(), cell.second.name(), count});
  }
  return t;
}

Table histogram_table(const EngagementHistogram& h, const HistogramSpec& spec) {
  Table t({"bucket", "count"});
  for (std::size_t i = 0; i < h.counts.size(); ++i) t.add_row({spec.label(i), h.counts[i]});
  if (h.below_range > 0) t.add_row({"<" + std::to_string(spec.edges().front()), h.below_range});
  t.add_row({std::string("unknown"), h.unknown});
  return t;
}

Table max_engagement_table(const EngagementHistogram& h) {
  Table t({"platform", "id", "name", "conversations"});
  if (h.max_record) {
    const auto& r = *h.max_record;
    t.add_row({r.platform.name(), r.id, r.name, *r.conversation_count});
  }
  return t;
}

Table rank_table(const RankTargeting& ranks) {
  Table t({"rank", "hits"});
  for (const auto& [rank, count] : ranks.by_rank) t.add_row({std::to_string(rank), count});
  if (ranks.unranked > 0) t.add_row({std::string("unranked"), ranks.unranked});
  return t;
}

Table record_errors_table(std::span<const RecordError> errors) {
  Table t({"element", "line", "message"});
  for (const auto& e : errors) t.add_row({u64(e.element), u64(e.line), e.message});
  return t;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["config_digest"] = config_digest;
  j["input_digest"] = input_digest;
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  j["counts"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : counts) j["counts"][k] = v;
  return j.dump(2) + "\n";
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw PipelineError("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace appsquat
