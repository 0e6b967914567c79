#pragma once

// UTF-8 and Unicode helpers shared by every module. Strings are UTF-8 in
// std::string; per-character work happens on std::u32string (code points).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace appsquat::text {

// Byte offset of the first ill-formed UTF-8 sequence, or nullopt if valid.
std::optional<std::size_t> find_invalid_utf8(std::string_view bytes);

// Throws DecodeError on ill-formed input.
std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view code_points);
std::string to_utf8(char32_t code_point);

// Length in Unicode scalar values. Input must be valid UTF-8.
std::size_t length(std::string_view utf8);

// Canonical composition (NFC).
std::string nfc(std::string_view utf8);

// Strips leading and trailing Unicode White_Space.
std::string trim(std::string_view utf8);

// nfc + trim: the form every stored text field takes.
std::string canonicalize(std::string_view utf8);

// Full Unicode case folding, for case-insensitive comparison.
std::string casefold(std::string_view utf8);

bool is_alnum(char32_t c);
bool is_punct(char32_t c);
bool is_upper(char32_t c);
bool is_lower(char32_t c);
bool is_space(char32_t c);
char32_t to_lower(char32_t c);
char32_t to_upper(char32_t c);

}  // namespace appsquat::text
