#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "denum/backend.hpp"
#include "denum/container.hpp"
#include "denum/error.hpp"
#include "denum/extract.hpp"
#include "denum/pattern.hpp"
#include "denum/stringstore.hpp"

namespace denum {

struct Config {
  uint64_t chunk_lines = 100000;
  unsigned threads = 4;
  std::string backend = "lzma";
  int backend_level = -1;  // -1: backend default
  PatternRegistry registry = PatternRegistry::default_registry();
  bool no_numeric = false;  // ablation: skip token extraction entirely
  bool no_string = false;   // ablation: store skeletons plainly, no dictionary
};

struct Metrics {
  uint64_t original_bytes = 0;
  uint64_t compressed_bytes = 0;
  double elapsed_seconds = 0;

  double cr() const {
    return compressed_bytes ? static_cast<double>(original_bytes) / compressed_bytes : 0;
  }
  // Bytes per second; divide by 1e6 for the MB/s the bench report prints.
  double cs() const {
    return elapsed_seconds > 0 ? static_cast<double>(original_bytes) / elapsed_seconds : 0;
  }
};

namespace detail {

// Runs fn(0..jobs) on up to `threads` workers, rethrowing the first failure.
// Job pickup order is nondeterministic but callers assemble results by index,
// so outputs never depend on scheduling.
template <class Fn>
void parallel_for(size_t jobs, unsigned threads, Fn&& fn) {
  if (jobs == 0) return;
  size_t workers = threads == 0 ? 1 : threads;
  if (workers > jobs) workers = jobs;
  if (workers <= 1) {
    for (size_t i = 0; i < jobs; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&] {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct SplitLines {
  std::vector<std::string_view> lines;
  bool trailing_newline = false;
};

inline SplitLines split_lines(ByteView text) {
  SplitLines r;
  r.trailing_newline = !text.empty() && text.back() == '\n';
  size_t n = 0;
  for (char c : text) n += c == '\n';
  r.lines.reserve(n + 1);
  size_t start = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\n') {
      r.lines.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  if (start < text.size()) r.lines.push_back(text.substr(start));
  return r;
}

// Extraction plus grouping for a slice of lines; the shared worker body of
// compress and preprocess.
inline ChunkArtifacts build_artifacts(std::span<const std::string_view> lines,
                                      const Config& config) {
  ChunkArtifacts a;
  a.skeletons.reserve(lines.size());
  for (ByteView line : lines) {
    if (config.no_numeric) {
      a.skeletons.emplace_back(line);
      continue;
    }
    ExtractResult ex = extract_line(line, config.registry);
    for (auto& tok : ex.tokens) {
      auto it = a.groups.find(tok.tag);
      if (it == a.groups.end()) {
        TagGroupData g;
        g.strategy = classify_strategy(tok.tag, config.registry);
        it = a.groups.emplace(tok.tag, std::move(g)).first;
      }
      TagGroupData& g = it->second;
      if (g.strategy == Strategy::Verbatim)
        g.entries.emplace_back(tok.raw);
      else
        g.values.insert(g.values.end(), tok.segments.begin(), tok.segments.end());
    }
    a.skeletons.push_back(std::move(ex.skeleton));
  }
  return a;
}

}  // namespace detail

struct CompressOutput {
  Bytes container;
  Metrics metrics;
};

// Splits the input on 0x0A into chunk_lines-sized chunks, transforms each
// chunk independently (in parallel), and feeds manifest plus chunk blobs
// through the backend as a single stream. Container bytes do not depend on
// the thread count.
inline CompressOutput compress(ByteView input, const Config& config) {
  auto t0 = std::chrono::steady_clock::now();
  if (config.chunk_lines == 0) fail(Errc::OutOfRange, "chunk_lines must be positive");
  const Backend& backend = backend_by_name(config.backend);

  detail::SplitLines split = detail::split_lines(input);
  size_t chunk_count =
      (split.lines.size() + config.chunk_lines - 1) / config.chunk_lines;

  std::vector<Bytes> blobs(chunk_count);
  std::vector<std::vector<std::string>> chunk_tags(chunk_count);
  detail::parallel_for(chunk_count, config.threads, [&](size_t i) {
    size_t begin = i * config.chunk_lines;
    size_t end = std::min(begin + config.chunk_lines, split.lines.size());
    std::span<const std::string_view> lines(split.lines.data() + begin, end - begin);
    ChunkArtifacts a = detail::build_artifacts(lines, config);
    for (const auto& [tag, group] : a.groups) chunk_tags[i].push_back(tag);
    blobs[i] = chunk_serialize(a, config.no_string);
  });

  Manifest m;
  m.no_numeric = config.no_numeric;
  m.no_string = config.no_string;
  m.fingerprint = config.registry.fingerprint();
  m.total_lines = split.lines.size();
  m.trailing_newline = split.trailing_newline;
  uint64_t offset = 0;
  for (size_t i = 0; i < chunk_count; ++i) {
    ChunkInfo c;
    c.offset = offset;
    c.size = blobs[i].size();
    size_t begin = i * config.chunk_lines;
    c.line_count = std::min(config.chunk_lines, split.lines.size() - begin);
    c.tags = std::move(chunk_tags[i]);
    offset += c.size;
    m.chunks.push_back(std::move(c));
  }

  Bytes body = manifest_serialize(m);
  size_t manifest_size = body.size();
  body.reserve(manifest_size + offset);
  for (auto& blob : blobs) {
    body += blob;
    blob.clear();
    blob.shrink_to_fit();
  }

  CompressOutput out;
  out.container.reserve(body.size() / 4 + 64);
  out.container.append(kMagic, sizeof kMagic);
  out.container.push_back(static_cast<char>(kFormatVersion));
  out.container.push_back(static_cast<char>(backend.id()));
  int level = config.backend_level < 0 ? backend.default_level() : config.backend_level;
  out.container.push_back(static_cast<char>(level));
  out.container += backend.compress(body, config.backend_level);

  out.metrics.original_bytes = input.size();
  out.metrics.compressed_bytes = out.container.size();
  out.metrics.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace detail {

struct ParsedContainer {
  uint8_t backend_id = 0;
  uint8_t backend_level = 0;
  Bytes body;
  Manifest manifest;
  size_t chunk_area_pos = 0;  // offset of chunk data within body
};

inline ParsedContainer container_open(ByteView container) {
  if (container.size() < 7 || ByteView(container.data(), 4) != ByteView(kMagic, 4))
    fail(Errc::BadMagic, "not a DNUM container");
  if (static_cast<uint8_t>(container[4]) != kFormatVersion)
    fail(Errc::Corrupt, "unsupported container version");
  ParsedContainer p;
  p.backend_id = static_cast<uint8_t>(container[5]);
  p.backend_level = static_cast<uint8_t>(container[6]);
  const Backend& backend = backend_by_id(p.backend_id);
  p.body = backend.decompress(container.substr(7));
  ByteReader r(p.body);
  p.manifest = manifest_parse(r);
  p.chunk_area_pos = r.pos();
  uint64_t chunk_bytes = 0;
  uint64_t manifest_lines = 0;
  for (const auto& c : p.manifest.chunks) {
    chunk_bytes += c.size;
    manifest_lines += c.line_count;
  }
  if (p.chunk_area_pos + chunk_bytes != p.body.size())
    fail(Errc::Corrupt, "chunk table does not cover the container body");
  if (manifest_lines != p.manifest.total_lines)
    fail(Errc::Corrupt, "per-chunk line counts disagree with the manifest total");
  return p;
}

// Restores the original text of one chunk. `last_chunk_unterminated` is true
// only for the final chunk of a container whose input lacked a trailing
// newline.
template <class Registry>
Bytes chunk_restore_text(ByteView blob, const ChunkInfo& info, bool no_numeric, bool no_string,
                         bool last_chunk_unterminated, const Registry& registry) {
  DecodedChunk chunk = chunk_parse(blob, info.line_count, no_string, registry);
  Bytes text;
  text.reserve(blob.size() + info.line_count);
  for (size_t i = 0; i < chunk.skeletons.size(); ++i) {
    if (no_numeric) {
      text += chunk.skeletons[i];
    } else {
      text += reinsert_line(chunk.skeletons[i], chunk.queues, registry);
    }
    if (!(last_chunk_unterminated && i + 1 == chunk.skeletons.size())) text.push_back('\n');
  }
  if (!chunk.queues.all_drained())
    fail(Errc::Corrupt, "tag group holds more values than the skeletons consume");
  return text;
}

}  // namespace detail

// Exact inverse of compress. Any invariant violation inside the container
// surfaces as Corrupt; BadMagic, BackendUnavailable and FingerprintMismatch
// keep their own codes so callers can tell configuration errors from damage.
inline Bytes decompress(ByteView container, const Config& config) {
  try {
    detail::ParsedContainer p = detail::container_open(container);
    if (p.manifest.fingerprint != config.registry.fingerprint())
      fail(Errc::FingerprintMismatch,
           "container was built with a different pattern registry");
    std::vector<Bytes> texts(p.manifest.chunks.size());
    detail::parallel_for(p.manifest.chunks.size(), config.threads, [&](size_t i) {
      const ChunkInfo& info = p.manifest.chunks[i];
      ByteView blob = ByteView(p.body).substr(p.chunk_area_pos + info.offset, info.size);
      bool last_unterminated =
          !p.manifest.trailing_newline && i + 1 == p.manifest.chunks.size();
      texts[i] = detail::chunk_restore_text(blob, info, p.manifest.no_numeric,
                                            p.manifest.no_string, last_unterminated,
                                            config.registry);
    });
    Bytes out;
    size_t total = 0;
    for (const auto& t : texts) total += t.size();
    out.reserve(total);
    for (const auto& t : texts) out += t;
    return out;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::BadMagic:
      case Errc::FingerprintMismatch:
      case Errc::BackendUnavailable:
      case Errc::Corrupt:
        throw;
      default:
        fail(Errc::Corrupt, e.what());
    }
  }
}

// ---------------------------------------------------------------------------
// Container inspection: manifest fields plus per-chunk and per-tag size
// stats, decoded without a registry (and therefore without a fingerprint
// check); nothing here reconstructs log text.
// ---------------------------------------------------------------------------

struct TagStat {
  Strategy strategy = Strategy::Raw;
  uint64_t count = 0;  // stored values (Delta/Raw) or verbatim entries
  uint64_t payload_bytes = 0;
};

struct ChunkStat {
  uint64_t lines = 0;
  uint64_t size = 0;
  uint64_t dict_bytes = 0;
  uint64_t dict_entries = 0;
  uint64_t index_bytes = 0;
  uint64_t group_bytes = 0;
};

struct InspectInfo {
  uint8_t backend_id = 0;
  uint8_t backend_level = 0;
  std::string backend_name;
  bool no_numeric = false;
  bool no_string = false;
  uint64_t fingerprint = 0;
  uint64_t total_lines = 0;
  bool trailing_newline = false;
  uint64_t container_bytes = 0;
  uint64_t body_bytes = 0;
  std::vector<ChunkStat> chunks;
  std::map<std::string, TagStat, std::less<>> tags;

  // Fraction of the (uncompressed) body spent on numeric tag payloads.
  double numeric_byte_share() const {
    if (body_bytes == 0) return 0;
    uint64_t numeric = 0;
    for (const auto& [tag, stat] : tags) numeric += stat.payload_bytes;
    return static_cast<double>(numeric) / static_cast<double>(body_bytes);
  }
};

inline InspectInfo container_inspect(ByteView container) {
  detail::ParsedContainer p = detail::container_open(container);
  InspectInfo info;
  info.backend_id = p.backend_id;
  info.backend_level = p.backend_level;
  info.backend_name = std::string(backend_by_id(p.backend_id).name());
  info.no_numeric = p.manifest.no_numeric;
  info.no_string = p.manifest.no_string;
  info.fingerprint = p.manifest.fingerprint;
  info.total_lines = p.manifest.total_lines;
  info.trailing_newline = p.manifest.trailing_newline;
  info.container_bytes = container.size();
  info.body_bytes = p.body.size();
  for (const auto& c : p.manifest.chunks) {
    ByteView blob = ByteView(p.body).substr(p.chunk_area_pos + c.offset, c.size);
    ByteReader r(blob);
    ChunkStat stat;
    stat.lines = c.line_count;
    stat.size = c.size;
    stat.dict_bytes = r.elastic();
    stat.index_bytes = r.elastic();
    uint64_t dir_len = r.elastic();
    ByteView dict_bytes = r.take(stat.dict_bytes);
    stat.dict_entries = elastic_decode(dict_bytes).value;
    r.take(stat.index_bytes);
    auto dir = tag_directory_parse(r.take(dir_len));
    for (const auto& e : dir) {
      ByteView payload = r.take(e.payload_size);
      TagStat& ts = info.tags[e.tag];
      ts.strategy = e.strategy;
      ts.payload_bytes += e.payload_size;
      stat.group_bytes += e.payload_size;
      if (e.strategy == Strategy::Verbatim)
        ts.count += elastic_decode(payload).value;
      else
        ts.count += elastic_decode_all(payload).size();
    }
    info.chunks.push_back(stat);
  }
  return info;
}

// ---------------------------------------------------------------------------
// Preprocess interchange: the numeric stage alone, emitted as plain files so
// any external compressor can take over the string stage. The skeleton file
// mirrors the input's line structure (including the trailing-newline state);
// each tag group becomes one self-describing binary payload.
// ---------------------------------------------------------------------------

struct PreprocessResult {
  Bytes skeleton_text;
  std::map<std::string, Bytes, std::less<>> group_files;  // tag -> strategy byte + payload
};

inline PreprocessResult preprocess(ByteView input, const Config& config) {
  detail::SplitLines split = detail::split_lines(input);
  ChunkArtifacts a = detail::build_artifacts(split.lines, config);
  PreprocessResult r;
  r.skeleton_text.reserve(input.size() + 16);
  for (size_t i = 0; i < a.skeletons.size(); ++i) {
    r.skeleton_text += a.skeletons[i];
    if (!(i + 1 == a.skeletons.size() && !split.trailing_newline))
      r.skeleton_text.push_back('\n');
  }
  for (const auto& [tag, group] : a.groups) {
    Bytes file;
    file.push_back(static_cast<char>(group.strategy));
    file += tag_group_serialize(group);
    r.group_files.emplace(tag, std::move(file));
  }
  return r;
}

inline Bytes preprocess_invert(const PreprocessResult& files, const Config& config) {
  detail::SplitLines split = detail::split_lines(files.skeleton_text);
  TagQueues queues;
  for (const auto& [tag, file] : files.group_files) {
    if (file.empty()) fail(Errc::Corrupt, "empty tag group file for " + tag);
    auto s = static_cast<uint8_t>(file[0]);
    if (s > 2) fail(Errc::Corrupt, "bad strategy byte in tag group file for " + tag);
    auto strategy = static_cast<Strategy>(s);
    if (classify_strategy(tag, config.registry) != strategy)
      fail(Errc::Corrupt, "tag group strategy disagrees with registry for " + tag);
    queues.by_tag.emplace(tag, tag_group_parse(strategy, ByteView(file).substr(1)));
  }
  Bytes out;
  out.reserve(files.skeleton_text.size());
  for (size_t i = 0; i < split.lines.size(); ++i) {
    out += reinsert_line(split.lines[i], queues, config.registry);
    if (!(i + 1 == split.lines.size() && !split.trailing_newline)) out.push_back('\n');
  }
  if (!queues.all_drained())
    fail(Errc::Corrupt, "tag group holds more values than the skeleton consumes");
  return out;
}

}  // namespace denum
