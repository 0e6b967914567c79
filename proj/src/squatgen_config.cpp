#include <istream>
#include <iterator>

#include "appsquat/error.hpp"
#include "appsquat/squatgen.hpp"
#include "appsquat/text.hpp"
#include "json.hpp"

namespace appsquat {
namespace {

using nlohmann::json;

std::vector<std::string> string_list(const json& value, const std::string& key) {
  if (!value.is_array()) throw ArgumentError("config '" + key + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& item : value) {
    if (!item.is_string()) throw ArgumentError("config '" + key + "' must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

std::u32string code_points(const json& value, const std::string& key) {
  if (!value.is_string()) throw ArgumentError("config '" + key + "' must be a string");
  return text::to_u32(value.get_ref<const std::string&>());
}

}  // namespace

SquatGenConfig load_squatgen_config(std::istream& in) {
  const std::string body{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    throw DecodeError("malformed squatgen config", e.byte > 0 ? e.byte - 1 : 0);
  }
  if (!doc.is_object()) throw ArgumentError("squatgen config must be a JSON object");

  SquatGenConfig cfg = SquatGenConfig::defaults();
  for (const auto& [key, value] : doc.items()) {
    if (key == "word_lexicon") {
      cfg.word_lexicon = string_list(value, key);
    } else if (key == "symbol_set") {
      cfg.symbol_set = string_list(value, key);
    } else if (key == "emoji_set") {
      cfg.emoji_set = string_list(value, key);
    } else if (key == "expansion_chars") {
      cfg.expansion_chars = string_list(value, key);
    } else if (key == "substitution_targets") {
      cfg.substitution_targets = string_list(value, key);
    } else if (key == "extra_punctuation") {
      cfg.extra_punctuation = code_points(value, key);
    } else if (key == "unicode_punctuation") {
      if (!value.is_boolean()) throw ArgumentError("config 'unicode_punctuation' must be a boolean");
      cfg.unicode_punctuation = value.get<bool>();
    } else if (key == "rearrangement_separators") {
      cfg.rearrangement_separators = code_points(value, key);
    } else if (key == "rearrangement_token_limit") {
      if (!value.is_number_unsigned()) {
        throw ArgumentError("config 'rearrangement_token_limit' must be a positive integer");
      }
      cfg.rearrangement_token_limit = value.get<std::size_t>();
    } else if (key == "keyboard_map") {
      if (!value.is_object()) throw ArgumentError("config 'keyboard_map' must be an object");
      cfg.keyboard_map.clear();
      for (const auto& [letter, neighbours] : value.items()) {
        if (letter.size() != 1 || !neighbours.is_string()) {
          throw ArgumentError("keyboard_map entries must map one letter to a string");
        }
        cfg.keyboard_map[letter[0]] = neighbours.get<std::string>();
      }
    } else {
      throw ArgumentError("unknown squatgen config key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace appsquat
