#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "denum/error.hpp"
#include "denum/numcodec.hpp"

namespace denum {

struct StringViewHash {
  using is_transparent = void;
  size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

// Distinct lines in first-seen order; a line's ID is its position.
struct StringDict {
  std::vector<std::string> entries;
};

struct DictBuild {
  StringDict dict;
  std::vector<uint64_t> ids;  // one per input line, each < dict size
};

inline DictBuild dict_build(std::span<const std::string_view> lines) {
  DictBuild r;
  r.ids.reserve(lines.size());
  // Reserved up front so entry storage never reallocates and the map may key
  // views into it.
  r.dict.entries.reserve(lines.size());
  std::unordered_map<std::string_view, uint64_t, StringViewHash, std::equal_to<>> seen;
  seen.reserve(lines.size());
  for (std::string_view line : lines) {
    auto it = seen.find(line);
    if (it == seen.end()) {
      uint64_t id = r.dict.entries.size();
      r.dict.entries.emplace_back(line);
      seen.emplace(r.dict.entries.back(), id);
      r.ids.push_back(id);
    } else {
      r.ids.push_back(it->second);
    }
  }
  r.dict.entries.shrink_to_fit();
  return r;
}

inline std::vector<std::string_view> dict_restore(const StringDict& dict,
                                                  std::span<const uint64_t> ids) {
  std::vector<std::string_view> lines;
  lines.reserve(ids.size());
  for (uint64_t id : ids) {
    if (id >= dict.entries.size())
      fail(Errc::IdOutOfRange, "index ID " + std::to_string(id) + " >= dictionary size " +
                                   std::to_string(dict.entries.size()));
    lines.push_back(dict.entries[id]);
  }
  return lines;
}

// ---------------------------------------------------------------------------
// Wire layouts. A line block is an elastic entry count followed by the
// entries joined with 0x0A; entries never contain 0x0A, so no escaping is
// needed. The same layout backs dictionaries and verbatim tag groups. An ID
// stream is plain concatenated elastic values.
// ---------------------------------------------------------------------------

template <class Lines>
void lines_serialize(Bytes& out, const Lines& lines) {
  elastic_append(out, lines.size());
  bool first = true;
  for (const auto& line : lines) {
    if (!first) out.push_back('\n');
    first = false;
    out.append(line.data(), line.size());
  }
}

inline std::vector<std::string_view> lines_parse(ByteView in) {
  auto [count, used] = elastic_decode(in);
  ByteView body = in.substr(used);
  std::vector<std::string_view> lines;
  if (count == 0) {
    if (!body.empty()) fail(Errc::Corrupt, "line block claims zero entries but has payload");
    return lines;
  }
  if (count > body.size() + 1)
    fail(Errc::Corrupt, "line block entry count exceeds payload size");
  lines.reserve(count);
  size_t start = 0;
  for (size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == '\n') {
      lines.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  if (lines.size() != count)
    fail(Errc::Corrupt, "line block entry count mismatch: header says " + std::to_string(count) +
                            ", payload has " + std::to_string(lines.size()));
  return lines;
}

inline void ids_serialize(Bytes& out, std::span<const uint64_t> ids) {
  for (uint64_t id : ids) elastic_append(out, id);
}

inline std::vector<uint64_t> ids_parse(ByteView in, uint64_t expected_count) {
  auto ids = elastic_decode_all(in);
  if (ids.size() != expected_count)
    fail(Errc::Corrupt, "index stream holds " + std::to_string(ids.size()) + " IDs, expected " +
                            std::to_string(expected_count));
  return ids;
}

}  // namespace denum
