#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "denum/error.hpp"

namespace denum {

// Storage strategy of one tag group. Delta stores the first value then
// successive differences; Raw stores each value; Verbatim stores the raw
// token bytes untouched.
enum class Strategy : uint8_t {
  Delta = 0,
  Raw = 1,
  Verbatim = 2,
};

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Delta: return "Delta";
    case Strategy::Raw: return "Raw";
    case Strategy::Verbatim: return "Verbatim";
  }
  return "?";
}

enum class TokenKind : uint8_t {
  PurePattern,      // matched by an uppercase registry rule
  PureNumber,       // standalone digit run, 1..15 digits, no leading zero
  NumericVariable,  // alphanumeric token mixing letters and digits
  Oversized,        // digit run longer than 15 digits
  LeadingZero,      // digit run of length >= 2 starting with '0'
};

// n-th lowercase letter, 1-based: 1 -> 'a', ..., 15 -> 'o'.
inline char letter_map(int n) {
  if (n < 1 || n > 15) fail(Errc::OutOfRange, "letter_map argument outside 1..15");
  return static_cast<char>('a' + n - 1);
}

// Tag text for an extracted token. Pure numbers of length 1..2 get a single
// length letter (`64` -> `<b>`); lengths 3..15 add the leading-digit letter
// (`2024` -> `<db>`). Pattern matches carry their rule letter; everything
// else collapses to `<*>`.
inline std::string assign_tag(TokenKind kind, std::string_view raw, char rule_letter = '\0') {
  switch (kind) {
    case TokenKind::PurePattern:
      return {'<', rule_letter, '>'};
    case TokenKind::PureNumber: {
      auto len = static_cast<int>(raw.size());
      if (len <= 2) return {'<', letter_map(len), '>'};
      return {'<', letter_map(len), letter_map(raw[0] - '0'), '>'};
    }
    case TokenKind::NumericVariable:
    case TokenKind::Oversized:
    case TokenKind::LeadingZero:
      return "<*>";
  }
  fail(Errc::OutOfRange, "unknown token kind");
}

// Length of the tag shape starting at s[i], or 0 if none. The grammar is
// exactly <[a-z]{1,2}>, <[A-Z]>, or <*>; used both for substitution and for
// deciding which literal input substrings need escaping.
inline size_t tag_shape_len(std::string_view s, size_t i) {
  if (i >= s.size() || s[i] != '<' || i + 2 >= s.size()) return 0;
  char c1 = s[i + 1];
  if (c1 == '*' || (c1 >= 'A' && c1 <= 'Z'))
    return s[i + 2] == '>' ? 3 : 0;
  if (c1 >= 'a' && c1 <= 'z') {
    if (s[i + 2] == '>') return 3;
    if (i + 3 < s.size() && s[i + 2] >= 'a' && s[i + 2] <= 'z' && s[i + 3] == '>') return 4;
  }
  return 0;
}

// Storage strategy for a tag. Two lowercase letters mean Delta, one means
// Raw, uppercase defers to the rule registry, and `<*>` is always Verbatim.
// `Registry` must expose `find(char letter) -> const Rule*` with a
// `strategy` member; kept as a template so this header stays independent of
// the registry representation.
template <class Registry>
Strategy classify_strategy(std::string_view tag, const Registry& registry) {
  if (tag == "<*>") return Strategy::Verbatim;
  if (tag.size() == 3 && tag[1] >= 'A' && tag[1] <= 'Z') {
    const auto* rule = registry.find(tag[1]);
    if (!rule) fail(Errc::UnknownUppercaseTag, "no registry rule for tag " + std::string(tag));
    return rule->strategy;
  }
  if (tag.size() == 4) return Strategy::Delta;
  return Strategy::Raw;
}

}  // namespace denum
