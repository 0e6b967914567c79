#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "appsquat/corpus.hpp"

namespace appsquat {

// The first six are the typo models carried over from mobile-app squatting
// generators; the remaining eight target LLM app naming habits.
enum class SquatModel : std::uint8_t {
  CharacterOmission,
  CharacterDoubling,
  AdjacentKeyInsertion,
  AdjacentKeySubstitution,
  CharacterSwap,
  VowelSubstitution,
  CaseSubstitution,
  PunctuationDeletion,
  PunctuationSubstitution,
  StringExpansion,
  SymbolExpansion,
  WordExpansion,
  EmojiExpansion,
  StringRearrangement,
};

inline constexpr std::size_t kSquatModelCount = 14;

inline constexpr std::array<SquatModel, kSquatModelCount> kAllSquatModels{
    SquatModel::CharacterOmission,       SquatModel::CharacterDoubling,
    SquatModel::AdjacentKeyInsertion,    SquatModel::AdjacentKeySubstitution,
    SquatModel::CharacterSwap,           SquatModel::VowelSubstitution,
    SquatModel::CaseSubstitution,        SquatModel::PunctuationDeletion,
    SquatModel::PunctuationSubstitution, SquatModel::StringExpansion,
    SquatModel::SymbolExpansion,         SquatModel::WordExpansion,
    SquatModel::EmojiExpansion,          SquatModel::StringRearrangement,
};

constexpr bool is_inherited(SquatModel m) {
  return static_cast<std::uint8_t>(m) <= static_cast<std::uint8_t>(SquatModel::VowelSubstitution);
}

std::string_view model_name(SquatModel model);
std::optional<SquatModel> parse_model(std::string_view name);

// Report tag for exact-name duplicates; deliberately not a SquatModel.
inline constexpr std::string_view kIdenticalNameTag = "IdenticalName";

class ModelSet {
 public:
  ModelSet() = default;
  ModelSet(std::initializer_list<SquatModel> models) {
    for (auto m : models) insert(m);
  }
  static ModelSet all();
  // "all" or a comma-separated list of model names. Throws ArgumentError.
  static ModelSet parse(std::string_view spec);

  void insert(SquatModel m) { bits_.set(static_cast<std::size_t>(m)); }
  bool contains(SquatModel m) const { return bits_.test(static_cast<std::size_t>(m)); }
  bool empty() const { return bits_.none(); }
  std::size_t size() const { return bits_.count(); }

 private:
  std::bitset<kSquatModelCount> bits_;
};

struct SquatGenConfig {
  std::vector<std::string> word_lexicon;
  std::vector<std::string> symbol_set;
  std::vector<std::string> emoji_set;
  std::vector<std::string> expansion_chars;
  // Characters counted as punctuation on top of the Unicode P* categories.
  std::u32string extra_punctuation;
  bool unicode_punctuation = true;
  std::vector<std::string> substitution_targets;
  // Lowercase QWERTY neighbours for every letter a-z.
  std::map<char, std::string> keyboard_map;
  std::u32string rearrangement_separators;
  std::size_t rearrangement_token_limit = 4;

  static SquatGenConfig defaults();
  // Throws ArgumentError when a list is empty or the keyboard map is incomplete.
  void validate() const;
  bool is_punctuation(char32_t c) const;
};

// Reads a JSON object; absent keys keep their default values.
SquatGenConfig load_squatgen_config(std::istream& in);

struct Variant {
  std::string original;
  std::string variant;
  SquatModel model;

  friend bool operator==(const Variant&, const Variant&) = default;
};

// Deterministic and duplicate-free on (variant, model). Models are applied in
// enumeration order. Throws ArgumentError for a blank name.
std::vector<Variant> generate_variants(std::string_view name, const ModelSet& models,
                                       const SquatGenConfig& config = SquatGenConfig::defaults());

struct SquatHit {
  std::string original;
  std::string variant;
  std::optional<SquatModel> model;  // nullopt: identical-name duplicate
  AppRecord matched;
  AppRecord target;
  bool same_developer = false;

  std::string_view tag() const { return model ? model_name(*model) : kIdenticalNameTag; }
};

// Canonical name of a target -> target record. Earlier targets win on collisions.
using TargetMap = std::map<std::string, AppRecord, std::less<>>;
TargetMap make_target_map(std::span<const AppRecord> targets);

// Authors present on both sides and equal after trimming and case folding.
bool same_developer(const AppRecord& a, const AppRecord& b);

// Sorted by (target name, model, variant, matched platform, matched id).
void sort_hits(std::vector<SquatHit>& hits);

// Exact (case-sensitive) lookup of every variant in the corpus name index.
// Throws ArgumentError when a variant's original is not among the targets.
std::vector<SquatHit> match_variants(std::span<const Variant> variants, const Corpus& corpus,
                                     const TargetMap& targets);

std::vector<SquatHit> filter_same_developer(std::vector<SquatHit> hits);

// Non-target records sharing a target's exact name.
std::vector<SquatHit> find_identical_names(std::span<const AppRecord> targets, const Corpus& corpus);

}  // namespace appsquat
