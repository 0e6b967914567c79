#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "appsquat/analysis.hpp"
#include "appsquat/clonedetect.hpp"
#include "appsquat/corpus.hpp"
#include "appsquat/squatgen.hpp"

namespace appsquat {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ReportFormat { JsonLines, Csv };
ReportFormat parse_report_format(std::string_view s);
std::string_view file_extension(ReportFormat f);

// A real printed with exactly six decimal places.
struct Fixed6 {
  double value;
};

using Cell = std::variant<std::monostate, bool, std::int64_t, std::uint64_t, std::string, Fixed6,
                          std::vector<std::string>>;

class Table {
 public:
  explicit Table(std::vector<std::string> columns) : columns_(std::move(columns)) {}
  // Throws ArgumentError if the row width differs from the header.
  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<Cell>> rows_;
};

// json-lines: one object per row, keys in column order. CSV: RFC 4180 quoting,
// LF line ends, a header line; list cells are joined with ';'.
void write_table(std::ostream& out, const Table& table, ReportFormat format);

std::string member_label(const RecordKey& key);

Table hits_table(std::span<const SquatHit> hits);
Table edges_table(std::span<const SimilarityEdge> edges);
Table groups_table(std::span<const CloneGroup> groups);
Table group_flags_table(std::span<const GroupAnnotation> notes);
Table matrix_table(const CrossPlatformMatrix& matrix);
Table histogram_table(const EngagementHistogram& histogram, const HistogramSpec& spec);
Table max_engagement_table(const EngagementHistogram& histogram);
Table rank_table(const RankTargeting& ranks);
Table record_errors_table(std::span<const RecordError> errors);

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::string input_digest;
  std::string tool_version{kToolVersion};
  std::string timestamp;
  std::map<std::string, std::uint64_t> counts;

  std::string to_json() const;
};

std::string sha256_hex(std::string_view bytes);
std::string utc_timestamp_now();

}  // namespace appsquat
