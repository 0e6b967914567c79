#include "appsquat/squatgen.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <tuple>
#include <unordered_set>

#include "appsquat/error.hpp"
#include "appsquat/text.hpp"

namespace appsquat {
namespace {

constexpr std::array<std::string_view, kSquatModelCount> kModelNames{
    "CharacterOmission",       "CharacterDoubling",   "AdjacentKeyInsertion",
    "AdjacentKeySubstitution", "CharacterSwap",       "VowelSubstitution",
    "CaseSubstitution",        "PunctuationDeletion", "PunctuationSubstitution",
    "StringExpansion",         "SymbolExpansion",     "WordExpansion",
    "EmojiExpansion",          "StringRearrangement",
};

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }
char32_t ascii_lower(char32_t c) { return c >= U'A' && c <= U'Z' ? c + 32 : c; }
char32_t ascii_upper(char32_t c) { return c >= U'a' && c <= U'z' ? c - 32 : c; }

bool is_vowel(char32_t c) {
  switch (ascii_lower(c)) {
    case U'a': case U'e': case U'i': case U'o': case U'u': return true;
    default: return false;
  }
}

constexpr std::u32string_view kVowels = U"aeiou";

// Collects one model's candidates, dropping identities, blanks and repeats.
class Emitter {
 public:
  Emitter(const std::string& original, SquatModel model, std::vector<Variant>& out)
      : original_(original), model_(model), out_(out) {}

  void emit(std::u32string_view candidate) { emit_utf8(text::to_utf8(candidate)); }

  void emit_utf8(const std::string& candidate) {
    std::string clean = text::canonicalize(candidate);
    if (clean.empty() || clean == original_) return;
    if (seen_.insert(clean).second) out_.push_back({original_, std::move(clean), model_});
  }

 private:
  const std::string& original_;
  SquatModel model_;
  std::vector<Variant>& out_;
  std::unordered_set<std::string> seen_;
};

void character_omission(const std::u32string& name, Emitter& e) {
  for (std::size_t i = 0; i < name.size(); ++i) {
    std::u32string s = name;
    s.erase(i, 1);
    e.emit(s);
  }
}

void character_doubling(const std::u32string& name, Emitter& e) {
  for (std::size_t i = 0; i < name.size(); ++i) {
    std::u32string s = name;
    s.insert(s.begin() + static_cast<std::ptrdiff_t>(i), name[i]);
    e.emit(s);
  }
}

template <typename Fn>
void for_each_neighbour(const SquatGenConfig& cfg, char32_t c, Fn&& fn) {
  if (!is_ascii_letter(c)) return;
  auto it = cfg.keyboard_map.find(static_cast<char>(ascii_lower(c)));
  if (it == cfg.keyboard_map.end()) return;
  const bool upper = c >= U'A' && c <= U'Z';
  for (char adj : it->second) {
    const char32_t k = static_cast<char32_t>(static_cast<unsigned char>(adj));
    fn(upper ? ascii_upper(k) : ascii_lower(k));
  }
}

void adjacent_key_insertion(const std::u32string& name, const SquatGenConfig& cfg, Emitter& e) {
  for (std::size_t i = 0; i < name.size(); ++i) {
    for_each_neighbour(cfg, name[i], [&](char32_t adj) {
      std::u32string s = name;
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(i + 1), adj);
      e.emit(s);
    });
  }
}

void adjacent_key_substitution(const std::u32string& name, const SquatGenConfig& cfg, Emitter& e) {
  for (std::size_t i = 0; i < name.size(); ++i) {
    for_each_neighbour(cfg, name[i], [&](char32_t adj) {
      std::u32string s = name;
      s[i] = adj;
      e.emit(s);
    });
  }
}

void character_swap(const std::u32string& name, Emitter& e) {
  for (std::size_t i = 0; i + 1 < name.size(); ++i) {
    std::u32string s = name;
    std::swap(s[i], s[i + 1]);
    e.emit(s);
  }
}

void vowel_substitution(const std::u32string& name, Emitter& e) {
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (!is_vowel(name[i])) continue;
    const bool upper = name[i] >= U'A' && name[i] <= U'Z';
    for (char32_t v : kVowels) {
      if (v == ascii_lower(name[i])) continue;
      std::u32string s = name;
      s[i] = upper ? ascii_upper(v) : v;
      e.emit(s);
    }
  }
}

void case_substitution(const std::u32string& name, Emitter& e) {
  std::u32string lower = name, upper = name, inverted = name, title = name;
  for (std::size_t i = 0; i < name.size(); ++i) {
    const char32_t c = name[i];
    lower[i] = text::to_lower(c);
    upper[i] = text::to_upper(c);
    if (text::is_upper(c)) {
      inverted[i] = text::to_lower(c);
    } else if (text::is_lower(c)) {
      inverted[i] = text::to_upper(c);
    }
    const bool word_start = i == 0 || !text::is_alnum(name[i - 1]);
    title[i] = word_start ? text::to_upper(c) : text::to_lower(c);
  }
  e.emit(lower);
  e.emit(upper);
  e.emit(inverted);
  e.emit(title);
}

void punctuation_deletion(const std::u32string& name, const SquatGenConfig& cfg, Emitter& e) {
  std::u32string stripped;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (cfg.is_punctuation(name[i])) {
      positions.push_back(i);
    } else {
      stripped.push_back(name[i]);
    }
  }
  if (positions.empty()) return;
  e.emit(stripped);
  for (std::size_t pos : positions) {
    std::u32string s = name;
    s.erase(pos, 1);
    e.emit(s);
  }
}

void punctuation_substitution(const std::u32string& name, const SquatGenConfig& cfg, Emitter& e) {
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (!cfg.is_punctuation(name[i])) continue;
    for (const auto& target : cfg.substitution_targets) {
      std::u32string s = name.substr(0, i) + text::to_u32(target) + name.substr(i + 1);
      e.emit(s);
    }
  }
}

void affix(const std::string& name, const std::vector<std::string>& items, std::string_view sep,
           Emitter& e) {
  for (const auto& item : items) {
    e.emit_utf8(item + std::string(sep) + name);
    e.emit_utf8(name + std::string(sep) + item);
  }
}

void emoji_expansion(const std::string& name, const SquatGenConfig& cfg, Emitter& e) {
  for (const auto& emoji : cfg.emoji_set) {
    e.emit_utf8(name + emoji);
    e.emit_utf8(name + " " + emoji);
  }
}

void string_rearrangement(const std::u32string& name, const SquatGenConfig& cfg, Emitter& e) {
  const auto is_sep = [&](char32_t c) {
    return cfg.rearrangement_separators.find(c) != std::u32string::npos;
  };
  std::vector<std::u32string> tokens;
  std::map<char32_t, std::pair<std::size_t, std::size_t>> sep_stats;  // count, first position
  std::u32string current;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (is_sep(name[i])) {
      ++sep_stats.try_emplace(name[i], 0, i).first->second.first;
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(name[i]);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  if (tokens.size() < 2) return;

  char32_t dominant = U' ';
  std::size_t best_count = 0;
  std::size_t best_pos = name.size();
  for (const auto& [sep, stats] : sep_stats) {
    if (stats.first > best_count || (stats.first == best_count && stats.second < best_pos)) {
      dominant = sep;
      best_count = stats.first;
      best_pos = stats.second;
    }
  }

  const auto join = [&](const std::vector<std::size_t>& order) {
    std::u32string s;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i > 0) s.push_back(dominant);
      s += tokens[order[i]];
    }
    return s;
  };

  const std::size_t n = tokens.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (n <= cfg.rearrangement_token_limit) {
    while (std::next_permutation(order.begin(), order.end())) e.emit(join(order));
  } else {
    for (std::size_t k = 1; k < n; ++k) {
      std::vector<std::size_t> rotated(n);
      for (std::size_t i = 0; i < n; ++i) rotated[i] = (i + k) % n;
      e.emit(join(rotated));
    }
    std::vector<std::size_t> reversed(order.rbegin(), order.rend());
    e.emit(join(reversed));
  }
}

std::size_t model_rank(const std::optional<SquatModel>& m) {
  return m ? static_cast<std::size_t>(*m) : kSquatModelCount;
}

}  // namespace

std::string_view model_name(SquatModel model) { return kModelNames.at(static_cast<std::size_t>(model)); }

std::optional<SquatModel> parse_model(std::string_view name) {
  const std::string wanted = squash(name);
  for (std::size_t i = 0; i < kSquatModelCount; ++i) {
    if (squash(kModelNames[i]) == wanted) return static_cast<SquatModel>(i);
  }
  return std::nullopt;
}

ModelSet ModelSet::all() {
  ModelSet s;
  s.bits_.set();
  return s;
}

ModelSet ModelSet::parse(std::string_view spec) {
  const std::string trimmed = text::trim(spec);
  if (squash(trimmed) == "all") return all();
  ModelSet set;
  std::size_t start = 0;
  while (start <= trimmed.size()) {
    std::size_t comma = trimmed.find(',', start);
    if (comma == std::string::npos) comma = trimmed.size();
    const std::string item = text::trim(std::string_view(trimmed).substr(start, comma - start));
    if (!item.empty()) {
      auto model = parse_model(item);
      if (!model) throw ArgumentError("unknown squatting model '" + item + "'");
      set.insert(*model);
    }
    start = comma + 1;
  }
  if (set.empty()) throw ArgumentError("no squatting models selected");
  return set;
}

SquatGenConfig SquatGenConfig::defaults() {
  SquatGenConfig cfg;
  cfg.word_lexicon = {"pro", "plus", "AI", "GPT", "official", "free", "premium", "new", "2"};
  cfg.symbol_set = {"+", "#", "$", "!", "*"};
  cfg.emoji_set = {"\U0001F916", "\U0001F525", "✨", "\U0001F680", "⭐"};
  cfg.expansion_chars = {"0", "1", "2", "3", "4", "5", "6", "7", "8", "9"};
  cfg.extra_punctuation = U"·";
  cfg.unicode_punctuation = true;
  cfg.substitution_targets = {" ", "-", "_", "."};
  cfg.keyboard_map = {
      {'q', "wa"},   {'w', "qeas"}, {'e', "wrsd"}, {'r', "etdf"},   {'t', "ryfg"},   {'y', "tugh"},
      {'u', "yihj"}, {'i', "uojk"}, {'o', "ipkl"}, {'p', "ol"},     {'a', "qwsz"},   {'s', "weadzx"},
      {'d', "erfscx"}, {'f', "rtdgcv"}, {'g', "tyfhvb"}, {'h', "yugjbn"}, {'j', "uihknm"},
      {'k', "iojlm"}, {'l', "opk"}, {'z', "asx"},  {'x', "zsdc"},   {'c', "xdfv"},   {'v', "cfgb"},
      {'b', "vghn"}, {'n', "bhjm"}, {'m', "njk"},
  };
  cfg.rearrangement_separators = U" -_·.";
  cfg.rearrangement_token_limit = 4;
  return cfg;
}

void SquatGenConfig::validate() const {
  const auto check_list = [](const std::vector<std::string>& list, const char* what) {
    if (list.empty()) throw ArgumentError(std::string(what) + " must not be empty");
    for (const auto& item : list) {
      if (item.empty()) throw ArgumentError(std::string(what) + " contains an empty entry");
      if (text::find_invalid_utf8(item)) throw ArgumentError(std::string(what) + " contains ill-formed UTF-8");
    }
  };
  check_list(word_lexicon, "word_lexicon");
  check_list(symbol_set, "symbol_set");
  check_list(emoji_set, "emoji_set");
  check_list(expansion_chars, "expansion_chars");
  check_list(substitution_targets, "substitution_targets");
  if (!unicode_punctuation && extra_punctuation.empty()) throw ArgumentError("punctuation set is empty");
  if (rearrangement_separators.empty()) throw ArgumentError("rearrangement_separators must not be empty");
  if (rearrangement_token_limit < 1) throw ArgumentError("rearrangement_token_limit must be >= 1");
  for (char c = 'a'; c <= 'z'; ++c) {
    auto it = keyboard_map.find(c);
    if (it == keyboard_map.end() || it->second.empty()) {
      throw ArgumentError(std::string("keyboard_map has no neighbours for '") + c + "'");
    }
    for (char adj : it->second) {
      if (adj < 'a' || adj > 'z') throw ArgumentError("keyboard_map neighbours must be lowercase letters");
    }
  }
}

bool SquatGenConfig::is_punctuation(char32_t c) const {
  if (unicode_punctuation && text::is_punct(c)) return true;
  return extra_punctuation.find(c) != std::u32string::npos;
}

std::vector<Variant> generate_variants(std::string_view raw_name, const ModelSet& models,
                                       const SquatGenConfig& cfg) {
  const std::string name = text::canonicalize(raw_name);
  if (name.empty()) throw ArgumentError("generate_variants: name is blank");
  const std::u32string cps = text::to_u32(name);

  std::vector<Variant> out;
  for (SquatModel model : kAllSquatModels) {
    if (!models.contains(model)) continue;
    Emitter e(name, model, out);
    switch (model) {
      case SquatModel::CharacterOmission: character_omission(cps, e); break;
      case SquatModel::CharacterDoubling: character_doubling(cps, e); break;
      case SquatModel::AdjacentKeyInsertion: adjacent_key_insertion(cps, cfg, e); break;
      case SquatModel::AdjacentKeySubstitution: adjacent_key_substitution(cps, cfg, e); break;
      case SquatModel::CharacterSwap: character_swap(cps, e); break;
      case SquatModel::VowelSubstitution: vowel_substitution(cps, e); break;
      case SquatModel::CaseSubstitution: case_substitution(cps, e); break;
      case SquatModel::PunctuationDeletion: punctuation_deletion(cps, cfg, e); break;
      case SquatModel::PunctuationSubstitution: punctuation_substitution(cps, cfg, e); break;
      case SquatModel::StringExpansion: affix(name, cfg.expansion_chars, "", e); break;
      case SquatModel::SymbolExpansion: affix(name, cfg.symbol_set, "", e); break;
      case SquatModel::WordExpansion: affix(name, cfg.word_lexicon, " ", e); break;
      case SquatModel::EmojiExpansion: emoji_expansion(name, cfg, e); break;
      case SquatModel::StringRearrangement: string_rearrangement(cps, cfg, e); break;
    }
  }
  return out;
}

TargetMap make_target_map(std::span<const AppRecord> targets) {
  TargetMap map;
  for (const auto& t : targets) map.try_emplace(text::canonicalize(t.name), t);
  return map;
}

bool same_developer(const AppRecord& a, const AppRecord& b) {
  if (!a.author || !b.author) return false;
  const std::string x = text::casefold(text::canonicalize(*a.author));
  const std::string y = text::casefold(text::canonicalize(*b.author));
  return !x.empty() && x == y;
}

void sort_hits(std::vector<SquatHit>& hits) {
  std::sort(hits.begin(), hits.end(), [](const SquatHit& a, const SquatHit& b) {
    const auto ma = model_rank(a.model);
    const auto mb = model_rank(b.model);
    return std::tie(a.target.name, ma, a.variant, a.matched.platform, a.matched.id, a.target.platform,
                    a.target.id) < std::tie(b.target.name, mb, b.variant, b.matched.platform,
                                            b.matched.id, b.target.platform, b.target.id);
  });
}

std::vector<SquatHit> match_variants(std::span<const Variant> variants, const Corpus& corpus,
                                     const TargetMap& targets) {
  std::vector<SquatHit> hits;
  for (const auto& v : variants) {
    auto t = targets.find(v.original);
    if (t == targets.end()) throw ArgumentError("variant original '" + v.original + "' is not a target");
    const AppRecord& target = t->second;
    for (std::size_t pos : corpus.find_by_name(v.variant)) {
      const AppRecord& rec = corpus[pos];
      if (rec.key() == target.key()) continue;
      hits.push_back({v.original, v.variant, v.model, rec, target, same_developer(rec, target)});
    }
  }
  sort_hits(hits);
  return hits;
}

std::vector<SquatHit> filter_same_developer(std::vector<SquatHit> hits) {
  std::erase_if(hits, [](const SquatHit& h) { return h.same_developer; });
  return hits;
}

std::vector<SquatHit> find_identical_names(std::span<const AppRecord> targets, const Corpus& corpus) {
  std::set<RecordKey> target_keys;
  for (const auto& t : targets) target_keys.insert(t.key());
  std::vector<SquatHit> hits;
  for (const auto& [name, target] : make_target_map(targets)) {
    for (std::size_t pos : corpus.find_by_name(name)) {
      const AppRecord& rec = corpus[pos];
      if (target_keys.count(rec.key())) continue;
      hits.push_back({name, name, std::nullopt, rec, target, same_developer(rec, target)});
    }
  }
  sort_hits(hits);
  return hits;
}

}  // namespace appsquat
