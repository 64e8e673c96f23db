#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "denum/error.hpp"
#include "denum/numcodec.hpp"
#include "denum/pattern.hpp"
#include "denum/tagging.hpp"

namespace denum {

// Literal input bytes that would parse as a tag are protected with this
// prefix byte in the skeleton; the escape byte itself is doubled.
inline constexpr char kEscapeByte = '\x1B';

// Digit runs above this length are never parsed into values.
inline constexpr size_t kMaxDigits = 15;

struct Span {
  size_t pos = 0;
  size_t len = 0;
  size_t end() const { return pos + len; }
};

// One extracted numeric occurrence. `raw` views into the scanned line and is
// valid only while that line's buffer lives. `segments` holds the values of
// the digit runs of the match, in order; variable-kind tokens keep it empty
// and are stored verbatim instead.
struct NumericToken {
  TokenKind kind;
  Span span;
  ByteView raw;
  std::vector<uint64_t> segments;
  std::string tag;
  const PatternRule* rule = nullptr;  // PurePattern only
};

struct ExtractResult {
  std::string skeleton;
  std::vector<NumericToken> tokens;  // strictly increasing spans
};

namespace detail {

// Appends literal bytes to the skeleton, escaping the escape byte and any
// substring that happens to match the tag grammar. Reinsertion treats the
// byte after an escape as literal, so escaped text can never be mistaken for
// a substitution point.
inline void append_escaped(std::string& out, ByteView text) {
  for (size_t i = 0; i < text.size(); ++i) {
    char b = text[i];
    if (b == kEscapeByte) {
      out.push_back(kEscapeByte);
      out.push_back(kEscapeByte);
    } else if (b == '<' && tag_shape_len(text, i) > 0) {
      out.push_back(kEscapeByte);
      out.push_back('<');
    } else {
      out.push_back(b);
    }
  }
}

inline bool range_claimed(const std::vector<uint8_t>& mask, size_t pos, size_t len) {
  for (size_t i = pos; i < pos + len; ++i)
    if (mask[i]) return true;
  return false;
}

inline uint64_t parse_digits(ByteView run) {
  uint64_t v = 0;
  std::from_chars(run.data(), run.data() + run.size(), v);
  return v;
}

// Splits the matched text into digit-run segments and verifies that the
// rule's template reproduces the match byte-for-byte. A false return means
// the rule does not apply at this site and the region falls through to the
// later extraction passes.
inline bool rule_segments(const PatternRule& rule, ByteView raw, std::vector<uint64_t>& segments,
                          std::string& scratch) {
  segments.clear();
  size_t i = 0;
  while (i < raw.size()) {
    if (is_ascii_digit(raw[i])) {
      size_t j = i;
      while (j < raw.size() && is_ascii_digit(raw[j])) ++j;
      if (j - i > kMaxDigits) return false;
      segments.push_back(parse_digits(raw.substr(i, j - i)));
      i = j;
    } else {
      ++i;
    }
  }
  if (segments.size() != rule.slot_count) return false;
  scratch.clear();
  rule.render(segments, scratch);
  if (scratch != raw) return false;
  if (rule.validator == RuleValidator::Ipv4Octets)
    for (uint64_t v : segments)
      if (v > 255) return false;
  return true;
}

}  // namespace detail

// Scans one line (no newline bytes) and extracts every numeric token in
// precedence order: registry rules first, then standalone digit runs, then
// alphanumeric variables. Returns the number-free skeleton with tags
// substituted in place. Total over arbitrary byte strings.
inline ExtractResult extract_line(ByteView line, const PatternRegistry& registry) {
  ExtractResult result;
  result.skeleton.reserve(line.size() + 8);

  thread_local std::vector<uint8_t> mask;
  thread_local std::string scratch;
  mask.assign(line.size(), 0);

  auto claim = [&](size_t pos, size_t len) {
    for (size_t i = pos; i < pos + len; ++i) mask[i] = 1;
  };

  // Pass 1: registry rules, in order. A match that overlaps an earlier claim
  // or fails validation is skipped and the scan resumes one byte later.
  for (const auto& rule : registry.rules()) {
    size_t pos = 0;
    RuleMatch m;
    while (pos < line.size() && rule.matcher->find(line, pos, m)) {
      if (detail::range_claimed(mask, m.pos, m.len)) {
        pos = m.pos + 1;
        continue;
      }
      ByteView raw = line.substr(m.pos, m.len);
      NumericToken tok;
      if (!detail::rule_segments(rule, raw, tok.segments, scratch)) {
        pos = m.pos + 1;
        continue;
      }
      tok.kind = TokenKind::PurePattern;
      tok.span = {m.pos, m.len};
      tok.raw = raw;
      tok.rule = &rule;
      tok.tag = rule.tag();
      claim(m.pos, m.len);
      result.tokens.push_back(std::move(tok));
      pos = m.pos + m.len;
    }
  }

  // Pass 2: pure numbers. Maximal unclaimed digit runs, skipped when an
  // unclaimed ASCII letter sits directly next to the run (those digits belong
  // to a variable). Claim boundaries never block.
  for (size_t i = 0; i < line.size();) {
    if (mask[i] || !is_ascii_digit(line[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j < line.size() && !mask[j] && is_ascii_digit(line[j])) ++j;
    bool blocked = (i > 0 && !mask[i - 1] && is_ascii_alpha(line[i - 1])) ||
                   (j < line.size() && !mask[j] && is_ascii_alpha(line[j]));
    if (!blocked) {
      NumericToken tok;
      tok.span = {i, j - i};
      tok.raw = line.substr(i, j - i);
      size_t len = j - i;
      if (len > kMaxDigits)
        tok.kind = TokenKind::Oversized;
      else if (len >= 2 && line[i] == '0')
        tok.kind = TokenKind::LeadingZero;
      else {
        tok.kind = TokenKind::PureNumber;
        tok.segments.push_back(detail::parse_digits(tok.raw));
      }
      tok.tag = assign_tag(tok.kind, tok.raw);
      claim(i, len);
      result.tokens.push_back(std::move(tok));
    }
    i = j;
  }

  // Pass 3: numeric variables. Maximal unclaimed alphanumeric runs holding at
  // least one digit and one letter.
  for (size_t i = 0; i < line.size();) {
    if (mask[i] || !is_ascii_alnum(line[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    bool has_digit = false, has_alpha = false;
    while (j < line.size() && !mask[j] && is_ascii_alnum(line[j])) {
      has_digit |= is_ascii_digit(line[j]);
      has_alpha |= is_ascii_alpha(line[j]);
      ++j;
    }
    if (has_digit && has_alpha) {
      NumericToken tok;
      tok.kind = TokenKind::NumericVariable;
      tok.span = {i, j - i};
      tok.raw = line.substr(i, j - i);
      tok.tag = "<*>";
      claim(i, j - i);
      result.tokens.push_back(std::move(tok));
    }
    i = j;
  }

  std::sort(result.tokens.begin(), result.tokens.end(),
            [](const NumericToken& a, const NumericToken& b) { return a.span.pos < b.span.pos; });

  size_t cursor = 0;
  for (const auto& tok : result.tokens) {
    detail::append_escaped(result.skeleton, line.substr(cursor, tok.span.pos - cursor));
    result.skeleton += tok.tag;
    cursor = tok.span.end();
  }
  detail::append_escaped(result.skeleton, line.substr(cursor));
  return result;
}

// Per-tag value/entry stream consumed in skeleton order during reinsertion.
struct TagQueue {
  Strategy strategy = Strategy::Raw;
  std::vector<uint64_t> values;     // Delta/Raw
  std::vector<std::string> entries; // Verbatim (views would dangle; owned)
  size_t next = 0;

  size_t size() const {
    return strategy == Strategy::Verbatim ? entries.size() : values.size();
  }
  bool drained() const { return next == size(); }
};

struct TagQueues {
  std::map<std::string, TagQueue, std::less<>> by_tag;

  TagQueue* find(std::string_view tag) {
    auto it = by_tag.find(tag);
    return it == by_tag.end() ? nullptr : &it->second;
  }
  bool all_drained() const {
    for (const auto& [tag, q] : by_tag)
      if (!q.drained()) return false;
    return true;
  }
};

// Inverse of extract_line: replaces tags left-to-right from the per-tag
// queues, re-renders patterned values through their rule template, and
// unescapes protected literals. Throws QueueUnderflow when a tag occurrence
// has no value left — the occurrence counts in a healthy container always
// match.
inline std::string reinsert_line(ByteView skeleton, TagQueues& queues,
                                 const PatternRegistry& registry) {
  std::string out;
  out.reserve(skeleton.size());
  size_t i = 0;
  while (i < skeleton.size()) {
    char b = skeleton[i];
    if (b == kEscapeByte) {
      if (i + 1 < skeleton.size()) {
        out.push_back(skeleton[i + 1]);
        i += 2;
      } else {
        out.push_back(b);  // lone trailing escape: not produced by extraction
        ++i;
      }
      continue;
    }
    size_t shape = (b == '<') ? tag_shape_len(skeleton, i) : 0;
    if (shape == 0) {
      out.push_back(b);
      ++i;
      continue;
    }
    ByteView tag = skeleton.substr(i, shape);
    TagQueue* q = queues.find(tag);
    if (!q) fail(Errc::QueueUnderflow, "no value stream for tag " + std::string(tag));
    if (tag[1] == '*') {
      if (q->next >= q->entries.size())
        fail(Errc::QueueUnderflow, "verbatim stream exhausted for <*>");
      out += q->entries[q->next++];
    } else if (tag[1] >= 'A' && tag[1] <= 'Z') {
      const PatternRule* rule = registry.find(tag[1]);
      if (!rule) fail(Errc::UnknownUppercaseTag, "no rule for tag " + std::string(tag));
      if (q->next + rule->slot_count > q->values.size())
        fail(Errc::QueueUnderflow, "value stream exhausted for " + std::string(tag));
      rule->render(std::span(q->values).subspan(q->next, rule->slot_count), out);
      q->next += rule->slot_count;
    } else {
      if (q->next >= q->values.size())
        fail(Errc::QueueUnderflow, "value stream exhausted for " + std::string(tag));
      char buf[20];
      auto r = std::to_chars(buf, buf + sizeof buf, q->values[q->next++]);
      out.append(buf, static_cast<size_t>(r.ptr - buf));
    }
    i += shape;
  }
  return out;
}

}  // namespace denum
