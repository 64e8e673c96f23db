#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <memory>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "denum/error.hpp"
#include "denum/numcodec.hpp"
#include "denum/tagging.hpp"

namespace denum {

inline bool is_ascii_digit(unsigned char c) { return c >= '0' && c <= '9'; }
inline bool is_ascii_alpha(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_alnum(unsigned char c) { return is_ascii_digit(c) || is_ascii_alpha(c); }

// FNV-1a, folded to 63 bits so fingerprints fit the elastic cap.
inline uint64_t fnv1a63(ByteView data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h & kElasticMax;
}

// One piece of a reconstruction template: either literal bytes or a value
// slot. Slot width 0 renders the plain decimal value (the matched digit run
// must then be free of leading zeros); width >= 2 zero-pads to exactly that
// many digits.
struct TemplatePiece {
  std::string literal;  // empty for slots
  int slot_width = -1;  // -1 literal, 0 variable width, >= 2 fixed width
};

inline std::vector<TemplatePiece> parse_template(std::string_view src) {
  std::vector<TemplatePiece> pieces;
  size_t slots = 0;
  size_t i = 0;
  while (i < src.size()) {
    if (src[i] == '#') {
      size_t j = i;
      while (j < src.size() && src[j] == '#') ++j;
      TemplatePiece p;
      p.slot_width = (j - i) == 1 ? 0 : static_cast<int>(j - i);
      pieces.push_back(std::move(p));
      ++slots;
      i = j;
    } else {
      if (is_ascii_digit(src[i]))
        fail(Errc::BadRegistry, "template literals must not contain digits: " + std::string(src));
      size_t j = i;
      while (j < src.size() && src[j] != '#') ++j;
      TemplatePiece p;
      p.literal = std::string(src.substr(i, j - i));
      for (char c : p.literal)
        if (is_ascii_digit(c) || c == '\n')
          fail(Errc::BadRegistry, "bad template literal: " + std::string(src));
      pieces.push_back(std::move(p));
      i = j;
    }
  }
  if (slots == 0) fail(Errc::BadRegistry, "template needs at least one slot: " + std::string(src));
  return pieces;
}

struct RuleMatch {
  size_t pos = 0;
  size_t len = 0;
};

// Leftmost-match scanner for a rule pattern. The two patterns the default
// registry ships are matched by hand-written scanners; anything else goes
// through std::regex. The fast scanners are behaviorally identical to the
// regex route (property-tested).
class RuleMatcher {
 public:
  static constexpr const char* kTimeSource = R"(\d{2}:\d{2}:\d{2})";
  static constexpr const char* kQuadSource = R"((\d+)\.(\d+)\.(\d+)\.(\d+))";

  explicit RuleMatcher(const std::string& pattern_src, bool force_generic = false) {
    if (!force_generic && pattern_src == kTimeSource) {
      kind_ = Kind::Time;
    } else if (!force_generic && pattern_src == kQuadSource) {
      kind_ = Kind::Quad;
    } else {
      kind_ = Kind::Generic;
      try {
        regex_ = std::regex(pattern_src, std::regex::ECMAScript | std::regex::optimize);
      } catch (const std::regex_error& e) {
        fail(Errc::BadRegistry, "cannot compile pattern '" + pattern_src + "': " + e.what());
      }
    }
  }

  bool find(ByteView line, size_t from, RuleMatch& out) const {
    switch (kind_) {
      case Kind::Time: return find_time(line, from, out);
      case Kind::Quad: return find_quad(line, from, out);
      case Kind::Generic: return find_generic(line, from, out);
    }
    return false;
  }

 private:
  enum class Kind { Time, Quad, Generic };

  static bool find_time(ByteView s, size_t from, RuleMatch& out) {
    if (s.size() < 8) return false;
    for (size_t i = from; i + 8 <= s.size(); ++i) {
      if (is_ascii_digit(s[i]) && is_ascii_digit(s[i + 1]) && s[i + 2] == ':' &&
          is_ascii_digit(s[i + 3]) && is_ascii_digit(s[i + 4]) && s[i + 5] == ':' &&
          is_ascii_digit(s[i + 6]) && is_ascii_digit(s[i + 7])) {
        out = {i, 8};
        return true;
      }
    }
    return false;
  }

  static bool find_quad(ByteView s, size_t from, RuleMatch& out) {
    size_t i = from;
    while (i < s.size()) {
      if (!is_ascii_digit(s[i])) {
        ++i;
        continue;
      }
      size_t p = i;
      bool ok = true;
      for (int part = 0; part < 4; ++part) {
        size_t run = p;
        while (run < s.size() && is_ascii_digit(s[run])) ++run;
        if (run == p) {
          ok = false;
          break;
        }
        p = run;
        if (part < 3) {
          if (p >= s.size() || s[p] != '.') {
            ok = false;
            break;
          }
          ++p;
        }
      }
      if (ok) {
        out = {i, p - i};
        return true;
      }
      // No start inside the leading digit run can do better: skip past it.
      size_t run_end = i;
      while (run_end < s.size() && is_ascii_digit(s[run_end])) ++run_end;
      i = (s.size() > run_end && s[run_end] == '.') ? i + 1 : run_end;
    }
    return false;
  }

  bool find_generic(ByteView s, size_t from, RuleMatch& out) const {
    if (from > s.size()) return false;
    std::cmatch m;
    auto flags = std::regex_constants::match_default;
    if (from > 0) flags |= std::regex_constants::match_prev_avail;
    const char* begin = s.data() + from;
    const char* end = s.data() + s.size();
    if (!std::regex_search(begin, end, m, regex_, flags)) return false;
    out = {from + static_cast<size_t>(m.position(0)), static_cast<size_t>(m.length(0))};
    return out.len > 0;  // zero-width matches would loop forever
  }

  Kind kind_;
  std::regex regex_;
};

// Extra semantic validation beyond the render-and-compare check every rule
// match undergoes. Ipv4Octets rejects dotted quads whose parts exceed 255.
enum class RuleValidator : uint8_t { None, Ipv4Octets };

struct PatternRule {
  char letter = '\0';
  Strategy strategy = Strategy::Raw;
  std::string template_src;
  std::string pattern_src;
  std::vector<TemplatePiece> pieces;
  size_t slot_count = 0;
  std::shared_ptr<const RuleMatcher> matcher;
  RuleValidator validator = RuleValidator::None;

  std::string tag() const { return {'<', letter, '>'}; }

  // Renders segment values through the template. Inverse of segment parsing
  // for every match the extractor accepts.
  void render(std::span<const uint64_t> segments, std::string& out) const {
    size_t next = 0;
    for (const auto& piece : pieces) {
      if (piece.slot_width < 0) {
        out += piece.literal;
        continue;
      }
      char buf[20];
      auto r = std::to_chars(buf, buf + sizeof buf, segments[next++]);
      size_t digits = static_cast<size_t>(r.ptr - buf);
      if (piece.slot_width >= 2)
        for (size_t pad = digits; pad < static_cast<size_t>(piece.slot_width); ++pad)
          out.push_back('0');
      out.append(buf, digits);
    }
  }

  std::string render(std::span<const uint64_t> segments) const {
    std::string out;
    render(segments, out);
    return out;
  }
};

inline const char* kDefaultRegistryText =
    "T\tDelta\t##:##:##\t\\d{2}:\\d{2}:\\d{2}\n"
    "I\tRaw\t#.#.#.#\t(\\d+)\\.(\\d+)\\.(\\d+)\\.(\\d+)\n";

// Ordered rule list plus a stable fingerprint over the canonicalized rule
// sources. The fingerprint travels in the container manifest so that
// decompression refuses to run with a different rule set.
class PatternRegistry {
 public:
  static PatternRegistry parse(ByteView text) {
    PatternRegistry reg;
    size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
      size_t eol = text.find('\n', pos);
      ByteView line;
      if (eol == ByteView::npos) {
        line = text.substr(pos);
        pos = text.size();
      } else {
        line = text.substr(pos, eol - pos);
        pos = eol + 1;
      }
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      size_t b = line.find_first_not_of(" \t");
      if (b == ByteView::npos) continue;
      if (line[b] == '#') continue;
      reg.add_rule_line(line, lineno);
    }
    reg.finish();
    return reg;
  }

  static PatternRegistry default_registry() { return parse(kDefaultRegistryText); }

  const std::vector<PatternRule>& rules() const { return rules_; }
  uint64_t fingerprint() const { return fingerprint_; }

  const PatternRule* find(char letter) const {
    for (const auto& r : rules_)
      if (r.letter == letter) return &r;
    return nullptr;
  }

  // Canonical text form: one rule per line, fields tab-separated, comments
  // dropped. The fingerprint is the FNV-1a hash of exactly these bytes.
  std::string canonical() const {
    std::string out;
    for (const auto& r : rules_) {
      out += r.letter;
      out += '\t';
      out += strategy_name(r.strategy);
      out += '\t';
      out += r.template_src;
      out += '\t';
      out += r.pattern_src;
      out += '\n';
    }
    return out;
  }

 private:
  void add_rule_line(ByteView line, int lineno) {
    auto where = [lineno] { return " (registry line " + std::to_string(lineno) + ")"; };
    size_t t1 = line.find('\t');
    size_t t2 = t1 == ByteView::npos ? ByteView::npos : line.find('\t', t1 + 1);
    size_t t3 = t2 == ByteView::npos ? ByteView::npos : line.find('\t', t2 + 1);
    if (t3 == ByteView::npos)
      fail(Errc::BadRegistry, "expected LETTER<TAB>STRATEGY<TAB>TEMPLATE<TAB>PATTERN" + where());
    ByteView letter = line.substr(0, t1);
    ByteView strategy = line.substr(t1 + 1, t2 - t1 - 1);
    ByteView templ = line.substr(t2 + 1, t3 - t2 - 1);
    ByteView pattern = line.substr(t3 + 1);

    PatternRule rule;
    if (letter.size() != 1 || letter[0] < 'A' || letter[0] > 'Z')
      fail(Errc::BadRegistry, "rule letter must be a single uppercase ASCII letter" + where());
    rule.letter = letter[0];
    if (find(rule.letter))
      fail(Errc::BadRegistry, std::string("duplicate rule letter ") + rule.letter + where());
    if (strategy == "Delta")
      rule.strategy = Strategy::Delta;
    else if (strategy == "Raw")
      rule.strategy = Strategy::Raw;
    else
      fail(Errc::BadRegistry, "strategy must be Delta or Raw" + where());
    if (pattern.empty()) fail(Errc::BadRegistry, "empty pattern" + where());
    rule.template_src = std::string(templ);
    rule.pattern_src = std::string(pattern);
    rule.pieces = parse_template(rule.template_src);
    for (const auto& p : rule.pieces)
      if (p.slot_width >= 0) ++rule.slot_count;
    rule.matcher = std::make_shared<RuleMatcher>(rule.pattern_src);
    if (rule.pattern_src == RuleMatcher::kQuadSource) rule.validator = RuleValidator::Ipv4Octets;
    rules_.push_back(std::move(rule));
  }

  void finish() { fingerprint_ = fnv1a63(canonical()); }

  std::vector<PatternRule> rules_;
  uint64_t fingerprint_ = fnv1a63("");
};

}  // namespace denum
