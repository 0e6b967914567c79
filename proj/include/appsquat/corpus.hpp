#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace appsquat {

// One of the six scraped stores, or a free-form label for anything else.
class Platform {
 public:
  enum class Kind { GPTStore, FlowGPT, Poe, Coze, Cici, CharacterAI, Other };

  Platform() : Platform(Kind::GPTStore) {}
  explicit Platform(Kind kind);

  // Known store names match case-insensitively; anything else becomes
  // Other(trimmed label). Throws ArgumentError for blank input.
  static Platform parse(std::string_view text);
  static Platform other(std::string_view label);

  Kind kind() const noexcept { return kind_; }
  // Display name for known stores, the label for Other.
  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Platform& a, const Platform& b) { return a.name_ == b.name_; }
  friend std::strong_ordering operator<=>(const Platform& a, const Platform& b) {
    return a.name_.compare(b.name_) <=> 0;
  }

 private:
  Kind kind_;
  std::string name_;
};

// (platform, id): the identity of an app across the whole corpus.
struct RecordKey {
  Platform platform;
  std::string id;

  friend bool operator==(const RecordKey&, const RecordKey&) = default;
  friend std::strong_ordering operator<=>(const RecordKey& a, const RecordKey& b) {
    if (auto c = a.platform <=> b.platform; c != 0) return c;
    return a.id.compare(b.id) <=> 0;
  }
};

std::string to_string(const RecordKey& key);

struct AppRecord {
  std::string id;
  Platform platform;
  std::string name;
  std::optional<std::string> description;
  std::optional<std::string> instructions;
  std::optional<std::string> author;
  std::optional<std::uint64_t> conversation_count;
  std::optional<std::uint64_t> rank;

  RecordKey key() const { return {platform, id}; }
  friend bool operator==(const AppRecord&, const AppRecord&) = default;
};

// Immutable, cheaply copyable collection of validated records with a name
// index (exact canonical name) and an id index ((platform, id)).
class Corpus {
 public:
  Corpus();
  // Throws ArgumentError if a name is blank or a (platform, id) repeats.
  explicit Corpus(std::vector<AppRecord> records);

  std::span<const AppRecord> records() const noexcept;
  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }
  const AppRecord& operator[](std::size_t i) const { return records()[i]; }

  // Positions of records whose name equals `name` byte-for-byte.
  std::span<const std::size_t> find_by_name(std::string_view name) const;
  const AppRecord* find(const RecordKey& key) const;
  std::optional<std::size_t> index_of(const RecordKey& key) const;

  // Walks both indices and checks them against the record list.
  bool indices_consistent() const;

 private:
  struct State;
  std::shared_ptr<const State> state_;
};

enum class InputFormat { JsonLines, JsonArray };

struct RecordError {
  std::size_t element = 0;  // 0-based position in the stream
  std::size_t line = 0;     // 1-based source line (json-lines only; 0 otherwise)
  std::string message;
};

struct LoadResult {
  Corpus corpus;
  std::size_t duplicate_count = 0;
  std::vector<RecordError> errors;
};

// Decodes, validates, canonicalizes and deduplicates a metadata dump.
// Ill-formed UTF-8 or JSON throws DecodeError; if every element fails
// validation, ValidationError. Otherwise bad elements land in `errors`.
LoadResult load_corpus(std::string_view bytes, InputFormat format);
LoadResult load_corpus(std::istream& in, InputFormat format);
// Format is sniffed from the first non-blank byte when not given.
LoadResult load_corpus_file(const std::filesystem::path& path,
                            std::optional<InputFormat> format = std::nullopt);

// One JSON object per line, schema identical to the input schema.
std::string serialize_record(const AppRecord& record);
void write_corpus(std::ostream& out, const Corpus& corpus);

// Names too generic to count as brand impersonation ("Image Generator").
class StopNameList {
 public:
  StopNameList() = default;
  explicit StopNameList(const std::vector<std::string>& names);
  // One name per line; blank lines and lines starting with '#' are skipped.
  static StopNameList parse(std::istream& in);
  static StopNameList load(const std::filesystem::path& path);

  bool contains(std::string_view name) const;
  std::size_t size() const noexcept { return folded_.size(); }
  bool empty() const noexcept { return folded_.empty(); }

 private:
  std::unordered_set<std::string> folded_;
};

Corpus filter_common_names(const Corpus& corpus, const StopNameList& stoplist);

// Ranked records by ascending rank, ties by (platform, id); at most k.
std::vector<AppRecord> top_ranked(const Corpus& corpus, std::size_t k);

}  // namespace appsquat
