#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "denum/error.hpp"
#include "denum/extract.hpp"
#include "denum/numcodec.hpp"
#include "denum/stringstore.hpp"
#include "denum/tagging.hpp"

namespace denum {

inline constexpr char kMagic[4] = {'D', 'N', 'U', 'M'};
inline constexpr uint8_t kFormatVersion = 1;

// Bounds-checked cursor over container bytes; every underrun throws.
class ByteReader {
 public:
  explicit ByteReader(ByteView data) : data_(data) {}

  size_t pos() const { return pos_; }
  size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }

  uint8_t u8() {
    if (pos_ >= data_.size()) fail(Errc::Truncated, "container ended early");
    return static_cast<uint8_t>(data_[pos_++]);
  }

  uint64_t elastic() {
    auto [v, used] = elastic_decode(data_.substr(pos_));
    pos_ += used;
    return v;
  }

  ByteView take(size_t n) {
    if (n > remaining()) fail(Errc::Truncated, "container section exceeds remaining bytes");
    ByteView v = data_.substr(pos_, n);
    pos_ += n;
    return v;
  }

 private:
  ByteView data_;
  size_t pos_ = 0;
};

struct ChunkInfo {
  uint64_t offset = 0;  // from the start of the chunk data area
  uint64_t size = 0;
  uint64_t line_count = 0;
  std::vector<std::string> tags;
};

struct Manifest {
  bool no_numeric = false;
  bool no_string = false;
  std::vector<ChunkInfo> chunks;
  uint64_t fingerprint = 0;
  uint64_t total_lines = 0;
  bool trailing_newline = false;
};

inline Bytes manifest_serialize(const Manifest& m) {
  Bytes out;
  uint64_t flags = (m.no_numeric ? 1u : 0u) | (m.no_string ? 2u : 0u);
  elastic_append(out, flags);
  elastic_append(out, m.chunks.size());
  for (const auto& c : m.chunks) {
    elastic_append(out, c.offset);
    elastic_append(out, c.size);
    elastic_append(out, c.line_count);
    elastic_append(out, c.tags.size());
    for (const auto& tag : c.tags) {
      elastic_append(out, tag.size());
      out += tag;
    }
  }
  elastic_append(out, m.fingerprint);
  elastic_append(out, m.total_lines);
  elastic_append(out, m.trailing_newline ? 1 : 0);
  return out;
}

inline Manifest manifest_parse(ByteReader& r) {
  Manifest m;
  uint64_t flags = r.elastic();
  if (flags > 3) fail(Errc::Corrupt, "unknown manifest flags");
  m.no_numeric = flags & 1;
  m.no_string = flags & 2;
  uint64_t chunk_count = r.elastic();
  if (chunk_count > r.remaining()) fail(Errc::Corrupt, "chunk count exceeds container size");
  m.chunks.reserve(chunk_count);
  uint64_t expected_offset = 0;
  for (uint64_t i = 0; i < chunk_count; ++i) {
    ChunkInfo c;
    c.offset = r.elastic();
    c.size = r.elastic();
    c.line_count = r.elastic();
    if (c.offset != expected_offset)
      fail(Errc::Corrupt, "chunk offsets not ascending/contiguous");
    expected_offset = c.offset + c.size;
    uint64_t tag_count = r.elastic();
    if (tag_count > c.size) fail(Errc::Corrupt, "tag count exceeds chunk size");
    c.tags.reserve(tag_count);
    for (uint64_t t = 0; t < tag_count; ++t) {
      uint64_t len = r.elastic();
      if (len > 4) fail(Errc::Corrupt, "tag text too long");
      c.tags.emplace_back(r.take(len));
    }
    m.chunks.push_back(std::move(c));
  }
  m.fingerprint = r.elastic();
  m.total_lines = r.elastic();
  uint64_t nl = r.elastic();
  if (nl > 1) fail(Errc::Corrupt, "bad trailing-newline flag");
  m.trailing_newline = nl == 1;
  return m;
}

// In-memory artifacts of one chunk on the compression side.
struct TagGroupData {
  Strategy strategy = Strategy::Raw;
  std::vector<uint64_t> values;
  std::vector<std::string> entries;
};

struct ChunkArtifacts {
  std::vector<std::string> skeletons;
  std::map<std::string, TagGroupData, std::less<>> groups;  // sorted: stable layout
};

inline Bytes tag_group_serialize(const TagGroupData& g) {
  Bytes payload;
  switch (g.strategy) {
    case Strategy::Delta:
      delta_serialize(payload, delta_encode(g.values));
      break;
    case Strategy::Raw:
      for (uint64_t v : g.values) elastic_append(payload, v);
      break;
    case Strategy::Verbatim:
      lines_serialize(payload, g.entries);
      break;
  }
  return payload;
}

inline TagQueue tag_group_parse(Strategy strategy, ByteView payload) {
  TagQueue q;
  q.strategy = strategy;
  switch (strategy) {
    case Strategy::Delta:
      q.values = delta_parse(payload);
      break;
    case Strategy::Raw:
      q.values = elastic_decode_all(payload);
      break;
    case Strategy::Verbatim:
      for (ByteView entry : lines_parse(payload)) q.entries.emplace_back(entry);
      break;
  }
  return q;
}

// Chunk layout: three elastic section lengths (dictionary, index stream, tag
// directory), then the sections, then the payloads in directory order. Under
// no_string the dictionary section carries every line in order and the index
// stream is empty.
inline Bytes chunk_serialize(const ChunkArtifacts& a, bool no_string) {
  Bytes dict_bytes, index_bytes, dir_bytes, payloads;
  if (no_string) {
    lines_serialize(dict_bytes, a.skeletons);
  } else {
    std::vector<std::string_view> views(a.skeletons.begin(), a.skeletons.end());
    DictBuild built = dict_build(views);
    lines_serialize(dict_bytes, built.dict.entries);
    ids_serialize(index_bytes, built.ids);
  }
  for (const auto& [tag, group] : a.groups) {
    Bytes payload = tag_group_serialize(group);
    elastic_append(dir_bytes, tag.size());
    dir_bytes += tag;
    dir_bytes.push_back(static_cast<char>(group.strategy));
    elastic_append(dir_bytes, payload.size());
    payloads += payload;
  }
  Bytes out;
  elastic_append(out, dict_bytes.size());
  elastic_append(out, index_bytes.size());
  elastic_append(out, dir_bytes.size());
  out += dict_bytes;
  out += index_bytes;
  out += dir_bytes;
  out += payloads;
  return out;
}

struct DecodedChunk {
  std::vector<std::string_view> skeletons;  // views into the chunk blob
  TagQueues queues;
};

struct TagDirEntry {
  std::string tag;
  Strategy strategy;
  uint64_t payload_size;
};

inline std::vector<TagDirEntry> tag_directory_parse(ByteView dir_bytes) {
  std::vector<TagDirEntry> dir;
  ByteReader r(dir_bytes);
  while (!r.done()) {
    TagDirEntry e;
    uint64_t tag_len = r.elastic();
    if (tag_len < 3 || tag_len > 4) fail(Errc::Corrupt, "bad tag length in directory");
    e.tag = std::string(r.take(tag_len));
    uint8_t s = r.u8();
    if (s > 2) fail(Errc::Corrupt, "bad strategy byte");
    e.strategy = static_cast<Strategy>(s);
    e.payload_size = r.elastic();
    dir.push_back(std::move(e));
  }
  return dir;
}

template <class Registry>
DecodedChunk chunk_parse(ByteView blob, uint64_t line_count, bool no_string,
                         const Registry& registry) {
  ByteReader r(blob);
  uint64_t dict_len = r.elastic();
  uint64_t index_len = r.elastic();
  uint64_t dir_len = r.elastic();
  ByteView dict_bytes = r.take(dict_len);
  ByteView index_bytes = r.take(index_len);
  ByteView dir_bytes = r.take(dir_len);

  DecodedChunk out;
  auto entries = lines_parse(dict_bytes);
  if (no_string) {
    if (!index_bytes.empty()) fail(Errc::Corrupt, "plain chunk carries an index stream");
    if (entries.size() != line_count) fail(Errc::Corrupt, "plain chunk line count mismatch");
    out.skeletons = std::move(entries);
  } else {
    auto ids = ids_parse(index_bytes, line_count);
    out.skeletons.reserve(ids.size());
    for (uint64_t id : ids) {
      if (id >= entries.size())
        fail(Errc::IdOutOfRange, "index ID " + std::to_string(id) + " >= dictionary size " +
                                     std::to_string(entries.size()));
      out.skeletons.push_back(entries[id]);
    }
  }

  for (const auto& e : tag_directory_parse(dir_bytes)) {
    ByteView payload = r.take(e.payload_size);
    if (classify_strategy(e.tag, registry) != e.strategy)
      fail(Errc::Corrupt, "strategy byte disagrees with tag classification for " + e.tag);
    if (out.queues.by_tag.count(e.tag)) fail(Errc::Corrupt, "duplicate tag group " + e.tag);
    out.queues.by_tag.emplace(e.tag, tag_group_parse(e.strategy, payload));
  }
  if (!r.done()) fail(Errc::Corrupt, "trailing bytes after chunk payloads");
  return out;
}

}  // namespace denum
