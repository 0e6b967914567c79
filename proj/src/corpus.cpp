#include "appsquat/corpus.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"

#include "appsquat/error.hpp"
#include "appsquat/text.hpp"

namespace appsquat {
namespace {

using nlohmann::json;

struct KnownPlatform {
  std::string_view key;
  std::string_view display;
  Platform::Kind kind;
};

constexpr std::array<KnownPlatform, 6> kKnownPlatforms{{
    {"gptstore", "GPTStore", Platform::Kind::GPTStore},
    {"flowgpt", "FlowGPT", Platform::Kind::FlowGPT},
    {"poe", "Poe", Platform::Kind::Poe},
    {"coze", "Coze", Platform::Kind::Coze},
    {"cici", "Cici", Platform::Kind::Cici},
    {"characterai", "CharacterAI", Platform::Kind::CharacterAI},
}};

std::optional<std::string> optional_text(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ValidationError(std::string("field '") + field + "' must be a string");
  std::string value = text::canonicalize(it->get_ref<const std::string&>());
  if (value.empty()) return std::nullopt;
  return value;
}

std::optional<std::uint64_t> optional_count(const json& obj, const char* field, std::uint64_t min) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  std::uint64_t value = 0;
  if (it->is_number_unsigned()) {
    value = it->get<std::uint64_t>();
  } else if (it->is_number_integer()) {
    throw ValidationError(std::string("field '") + field + "' must be >= " + std::to_string(min));
  } else {
    throw ValidationError(std::string("field '") + field + "' must be an integer");
  }
  if (value < min) {
    throw ValidationError(std::string("field '") + field + "' must be >= " + std::to_string(min));
  }
  return value;
}

AppRecord parse_record(const json& element) {
  if (!element.is_object()) throw ValidationError("record is not a JSON object");

  AppRecord rec;
  auto id = element.find("id");
  if (id == element.end() || id->is_null()) throw ValidationError("missing required field 'id'");
  if (id->is_string()) {
    rec.id = text::canonicalize(id->get_ref<const std::string&>());
  } else if (id->is_number_integer()) {
    rec.id = id->dump();
  } else {
    throw ValidationError("field 'id' must be a string or integer");
  }
  if (rec.id.empty()) throw ValidationError("field 'id' is blank");

  auto name = optional_text(element, "name");
  if (!name) throw ValidationError("missing required field 'name'");
  rec.name = std::move(*name);

  auto platform = element.find("platform");
  if (platform == element.end() || platform->is_null()) {
    throw ValidationError("missing required field 'platform'");
  }
  if (!platform->is_string()) throw ValidationError("field 'platform' must be a string");
  try {
    rec.platform = Platform::parse(platform->get_ref<const std::string&>());
  } catch (const ArgumentError& e) {
    throw ValidationError(e.what());
  }

  rec.description = optional_text(element, "description");
  rec.instructions = optional_text(element, "instructions");
  rec.author = optional_text(element, "author");
  rec.conversation_count = optional_count(element, "conversations", 0);
  rec.rank = optional_count(element, "rank", 1);
  return rec;
}

struct Collector {
  std::vector<AppRecord> records;
  std::map<RecordKey, std::size_t> seen;
  LoadResult result;
  std::size_t elements = 0;

  void add(const json& element, std::size_t line) {
    const std::size_t position = elements++;
    try {
      AppRecord rec = parse_record(element);
      if (!seen.emplace(rec.key(), records.size()).second) {
        ++result.duplicate_count;
        return;
      }
      records.push_back(std::move(rec));
    } catch (const ValidationError& e) {
      result.errors.push_back({position, line, e.what()});
    } catch (const DecodeError& e) {
      result.errors.push_back({position, line, e.what()});
    }
  }

  LoadResult finish() {
    if (elements > 0 && records.empty() && result.duplicate_count == 0) {
      throw ValidationError("all " + std::to_string(elements) +
                            " records are invalid; first error: " + result.errors.front().message);
    }
    result.corpus = Corpus(std::move(records));
    return std::move(result);
  }
};

std::string_view strip_bom(std::string_view bytes) {
  if (bytes.size() >= 3 && bytes.substr(0, 3) == "\xEF\xBB\xBF") bytes.remove_prefix(3);
  return bytes;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; });
}

}  // namespace

Platform::Platform(Kind kind) : kind_(kind) {
  for (const auto& known : kKnownPlatforms) {
    if (known.kind == kind) {
      name_ = std::string(known.display);
      return;
    }
  }
  throw ArgumentError("Platform::Other requires a label");
}

Platform Platform::parse(std::string_view raw) {
  const std::string label = text::canonicalize(raw);
  if (label.empty()) throw ArgumentError("platform is blank");
  std::string lowered = label;
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (const auto& known : kKnownPlatforms) {
    if (lowered == known.key) return Platform(known.kind);
  }
  return other(label);
}

Platform Platform::other(std::string_view label) {
  Platform p;
  p.kind_ = Kind::Other;
  p.name_ = text::canonicalize(label);
  if (p.name_.empty()) throw ArgumentError("platform label is blank");
  return p;
}

std::string to_string(const RecordKey& key) { return key.platform.name() + ":" + key.id; }

struct Corpus::State {
  std::vector<AppRecord> records;
  std::map<std::string, std::vector<std::size_t>, std::less<>> name_index;
  std::map<RecordKey, std::size_t> id_index;
};

Corpus::Corpus() : state_(std::make_shared<State>()) {}

Corpus::Corpus(std::vector<AppRecord> records) {
  auto state = std::make_shared<State>();
  state->records = std::move(records);
  for (std::size_t i = 0; i < state->records.size(); ++i) {
    const AppRecord& rec = state->records[i];
    if (text::trim(rec.name).empty()) throw ArgumentError("record " + to_string(rec.key()) + " has a blank name");
    if (rec.rank && *rec.rank == 0) throw ArgumentError("record " + to_string(rec.key()) + " has rank 0");
    if (!state->id_index.emplace(rec.key(), i).second) {
      throw ArgumentError("duplicate record key " + to_string(rec.key()));
    }
    state->name_index[rec.name].push_back(i);
  }
  state_ = std::move(state);
}

std::span<const AppRecord> Corpus::records() const noexcept { return state_->records; }
std::size_t Corpus::size() const noexcept { return state_->records.size(); }

std::span<const std::size_t> Corpus::find_by_name(std::string_view name) const {
  auto it = state_->name_index.find(name);
  if (it == state_->name_index.end()) return {};
  return it->second;
}

const AppRecord* Corpus::find(const RecordKey& key) const {
  auto idx = index_of(key);
  return idx ? &state_->records[*idx] : nullptr;
}

std::optional<std::size_t> Corpus::index_of(const RecordKey& key) const {
  auto it = state_->id_index.find(key);
  if (it == state_->id_index.end()) return std::nullopt;
  return it->second;
}

bool Corpus::indices_consistent() const {
  const auto& s = *state_;
  if (s.id_index.size() != s.records.size()) return false;
  std::size_t name_entries = 0;
  for (const auto& [name, positions] : s.name_index) {
    if (positions.empty()) return false;
    for (std::size_t pos : positions) {
      if (pos >= s.records.size() || s.records[pos].name != name) return false;
    }
    name_entries += positions.size();
  }
  if (name_entries != s.records.size()) return false;
  for (const auto& [key, pos] : s.id_index) {
    if (pos >= s.records.size() || s.records[pos].key() != key) return false;
  }
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    auto positions = find_by_name(s.records[i].name);
    if (std::find(positions.begin(), positions.end(), i) == positions.end()) return false;
    if (index_of(s.records[i].key()) != i) return false;
  }
  return true;
}

LoadResult load_corpus(std::string_view bytes, InputFormat format) {
  const std::size_t bom = bytes.size() - strip_bom(bytes).size();
  bytes = strip_bom(bytes);
  if (auto bad = text::find_invalid_utf8(bytes)) throw DecodeError("ill-formed UTF-8", *bad + bom);

  Collector collector;
  if (format == InputFormat::JsonLines) {
    std::size_t offset = 0;
    std::size_t line_no = 0;
    while (offset < bytes.size()) {
      const std::size_t nl = bytes.find('\n', offset);
      const std::size_t end = nl == std::string_view::npos ? bytes.size() : nl;
      const std::string_view line = bytes.substr(offset, end - offset);
      ++line_no;
      if (!is_blank(line)) {
        json element;
        try {
          element = json::parse(line);
        } catch (const json::parse_error& e) {
          const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
          throw DecodeError("malformed JSON on line " + std::to_string(line_no),
                            bom + offset + std::min(at, line.size()));
        }
        collector.add(element, line_no);
      }
      offset = end + 1;
    }
  } else {
    json doc;
    try {
      doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
      throw DecodeError("malformed JSON", bom + (e.byte > 0 ? e.byte - 1 : 0));
    }
    if (!doc.is_array()) throw DecodeError("expected a top-level JSON array", bom);
    for (const auto& element : doc) collector.add(element, 0);
  }
  return collector.finish();
}

LoadResult load_corpus(std::istream& in, InputFormat format) {
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return load_corpus(bytes, format);
}

LoadResult load_corpus_file(const std::filesystem::path& path, std::optional<InputFormat> format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open corpus file " + path.string());
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (!format) {
    const std::string_view body = strip_bom(bytes);
    const auto first = body.find_first_not_of(" \t\r\n");
    format = first != std::string_view::npos && body[first] == '[' ? InputFormat::JsonArray
                                                                  : InputFormat::JsonLines;
  }
  return load_corpus(bytes, *format);
}

std::string serialize_record(const AppRecord& rec) {
  nlohmann::ordered_json obj;
  obj["id"] = rec.id;
  obj["name"] = rec.name;
  obj["platform"] = rec.platform.name();
  if (rec.description) obj["description"] = *rec.description;
  if (rec.instructions) obj["instructions"] = *rec.instructions;
  if (rec.author) obj["author"] = *rec.author;
  if (rec.conversation_count) obj["conversations"] = *rec.conversation_count;
  if (rec.rank) obj["rank"] = *rec.rank;
  return obj.dump();
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const auto& rec : corpus.records()) out << serialize_record(rec) << '\n';
}

StopNameList::StopNameList(const std::vector<std::string>& names) {
  for (const auto& raw : names) {
    const std::string name = text::canonicalize(raw);
    if (name.empty()) throw ArgumentError("stoplist entries must be non-blank");
    folded_.insert(text::casefold(name));
  }
}

StopNameList StopNameList::parse(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  std::size_t line_no = 0;
  std::size_t offset = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto bad = text::find_invalid_utf8(line)) throw DecodeError("ill-formed UTF-8 in stoplist", offset + *bad);
    offset += line.size() + 1;
    const std::string name = text::canonicalize(line);
    if (name.empty() || name.front() == '#') continue;
    names.push_back(name);
  }
  return StopNameList(names);
}

StopNameList StopNameList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open stoplist " + path.string());
  return parse(in);
}

bool StopNameList::contains(std::string_view name) const {
  if (folded_.empty()) return false;
  return folded_.count(text::casefold(text::canonicalize(name))) > 0;
}

Corpus filter_common_names(const Corpus& corpus, const StopNameList& stoplist) {
  if (stoplist.empty()) return corpus;
  std::vector<AppRecord> kept;
  kept.reserve(corpus.size());
  for (const auto& rec : corpus.records()) {
    if (!stoplist.contains(rec.name)) kept.push_back(rec);
  }
  return Corpus(std::move(kept));
}

std::vector<AppRecord> top_ranked(const Corpus& corpus, std::size_t k) {
  if (k == 0) throw ArgumentError("top_ranked: k must be >= 1");
  std::vector<const AppRecord*> ranked;
  for (const auto& rec : corpus.records()) {
    if (rec.rank) ranked.push_back(&rec);
  }
  auto before = [](const AppRecord* a, const AppRecord* b) {
    if (*a->rank != *b->rank) return *a->rank < *b->rank;
    return a->key() < b->key();
  };
  const std::size_t n = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(), before);
  std::vector<AppRecord> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*ranked[i]);
  return out;
}

}  // namespace appsquat
