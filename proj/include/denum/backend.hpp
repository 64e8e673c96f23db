#pragma once

#include <lzma.h>
#include <zlib.h>

#include <cstdint>
#include <string>
#include <string_view>

#include "denum/error.hpp"
#include "denum/numcodec.hpp"

namespace denum {

// General-purpose compressor behind a bytes-in/bytes-out contract. The
// container records the backend ID so decompression picks the same one.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual uint8_t id() const = 0;
  virtual std::string_view name() const = 0;
  virtual int default_level() const = 0;
  virtual Bytes compress(ByteView in, int level) const = 0;
  virtual Bytes decompress(ByteView in) const = 0;
};

namespace detail {

class StoreBackend final : public Backend {
 public:
  uint8_t id() const override { return 0; }
  std::string_view name() const override { return "store"; }
  int default_level() const override { return 0; }
  Bytes compress(ByteView in, int) const override { return Bytes(in); }
  Bytes decompress(ByteView in) const override { return Bytes(in); }
};

class LzmaBackend final : public Backend {
 public:
  uint8_t id() const override { return 1; }
  std::string_view name() const override { return "lzma"; }
  int default_level() const override { return 6; }

  Bytes compress(ByteView in, int level) const override {
    uint32_t preset = level < 0 ? LZMA_PRESET_DEFAULT : static_cast<uint32_t>(level);
    Bytes out;
    out.resize(lzma_stream_buffer_bound(in.size()));
    size_t out_pos = 0;
    lzma_ret rc = lzma_easy_buffer_encode(
        preset, LZMA_CHECK_CRC32, nullptr, reinterpret_cast<const uint8_t*>(in.data()), in.size(),
        reinterpret_cast<uint8_t*>(out.data()), &out_pos, out.size());
    if (rc != LZMA_OK) fail(Errc::BackendUnavailable, "lzma encode failed, rc=" + std::to_string(rc));
    out.resize(out_pos);
    return out;
  }

  Bytes decompress(ByteView in) const override {
    lzma_stream strm = LZMA_STREAM_INIT;
    if (lzma_stream_decoder(&strm, UINT64_MAX, 0) != LZMA_OK)
      fail(Errc::BackendUnavailable, "lzma decoder init failed");
    Bytes out;
    out.resize(in.size() * 4 + 4096);
    strm.next_in = reinterpret_cast<const uint8_t*>(in.data());
    strm.avail_in = in.size();
    size_t total = 0;
    lzma_ret rc = LZMA_OK;
    while (true) {
      strm.next_out = reinterpret_cast<uint8_t*>(out.data()) + total;
      strm.avail_out = out.size() - total;
      rc = lzma_code(&strm, LZMA_FINISH);
      total = out.size() - strm.avail_out;
      if (rc == LZMA_STREAM_END) break;
      if (rc == LZMA_OK || rc == LZMA_BUF_ERROR) {
        if (strm.avail_out == 0) {
          out.resize(out.size() * 2);
          continue;
        }
        if (rc == LZMA_BUF_ERROR) {
          lzma_end(&strm);
          fail(Errc::Corrupt, "lzma stream truncated");
        }
        continue;
      }
      lzma_end(&strm);
      fail(Errc::Corrupt, "lzma decode failed, rc=" + std::to_string(rc));
    }
    lzma_end(&strm);
    out.resize(total);
    return out;
  }
};

class ZlibBackend final : public Backend {
 public:
  uint8_t id() const override { return 2; }
  std::string_view name() const override { return "zlib"; }
  int default_level() const override { return 6; }

  Bytes compress(ByteView in, int level) const override {
    int lvl = level < 0 ? default_level() : level;
    uLongf bound = compressBound(in.size());
    Bytes out;
    out.resize(bound);
    int rc = compress2(reinterpret_cast<Bytef*>(out.data()), &bound,
                       reinterpret_cast<const Bytef*>(in.data()), in.size(), lvl);
    if (rc != Z_OK) fail(Errc::BackendUnavailable, "zlib compress failed, rc=" + std::to_string(rc));
    out.resize(bound);
    return out;
  }

  Bytes decompress(ByteView in) const override {
    z_stream strm{};
    if (inflateInit(&strm) != Z_OK) fail(Errc::BackendUnavailable, "zlib inflate init failed");
    Bytes out;
    out.resize(in.size() * 4 + 4096);
    strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
    strm.avail_in = in.size();
    size_t total = 0;
    int rc = Z_OK;
    do {
      strm.next_out = reinterpret_cast<Bytef*>(out.data()) + total;
      strm.avail_out = out.size() - total;
      rc = inflate(&strm, Z_FINISH);
      total = out.size() - strm.avail_out;
      if (rc == Z_STREAM_END) break;
      if (rc == Z_OK || rc == Z_BUF_ERROR) {
        if (strm.avail_out == 0) {
          out.resize(out.size() * 2);
          continue;
        }
        inflateEnd(&strm);
        fail(Errc::Corrupt, "zlib stream truncated");
      } else {
        inflateEnd(&strm);
        fail(Errc::Corrupt, "zlib decode failed, rc=" + std::to_string(rc));
      }
    } while (true);
    inflateEnd(&strm);
    out.resize(total);
    return out;
  }
};

}  // namespace detail

inline const Backend& backend_by_name(std::string_view name) {
  static const detail::StoreBackend store;
  static const detail::LzmaBackend lzma;
  static const detail::ZlibBackend zlib;
  if (name == "store") return store;
  if (name == "lzma" || name == "xz") return lzma;
  if (name == "zlib") return zlib;
  fail(Errc::BackendUnavailable, "unknown backend '" + std::string(name) + "'");
}

inline const Backend& backend_by_id(uint8_t id) {
  switch (id) {
    case 0: return backend_by_name("store");
    case 1: return backend_by_name("lzma");
    case 2: return backend_by_name("zlib");
  }
  fail(Errc::BackendUnavailable, "unknown backend id " + std::to_string(id));
}

}  // namespace denum
