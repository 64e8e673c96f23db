#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "denum/error.hpp"

namespace denum {

// Byte buffers are std::string throughout: cheap slicing, easy file I/O, and
// views stay valid while the owning buffer lives.
using Bytes = std::string;
using ByteView = std::string_view;

// ---------------------------------------------------------------------------
// Elastic integers
//
// Variable-length unsigned integers, little-endian 7-bit groups. The most
// significant bit of each byte is a stop bit: 0 means the value continues,
// 1 marks the final byte. 35 encodes to the single byte 0xA3; every value
// below 128 takes exactly one byte. Values are capped at 63 payload bits
// (9 bytes), which upstream callers guarantee via the 15-decimal-digit token
// bound. This wire format is normative for containers.
// ---------------------------------------------------------------------------

inline constexpr uint64_t kElasticMax = (uint64_t{1} << 63) - 1;
inline constexpr size_t kElasticMaxBytes = 9;

inline void elastic_append(Bytes& out, uint64_t v) {
  if (v > kElasticMax) fail(Errc::Overflow, "elastic value needs more than 63 bits");
  while (v >= 0x80) {
    out.push_back(static_cast<char>(v & 0x7F));
    v >>= 7;
  }
  out.push_back(static_cast<char>(v | 0x80));
}

inline Bytes elastic_encode(uint64_t v) {
  Bytes out;
  elastic_append(out, v);
  return out;
}

struct ElasticDecoded {
  uint64_t value;
  size_t consumed;
};

inline ElasticDecoded elastic_decode(ByteView in) {
  uint64_t v = 0;
  size_t limit = in.size() < kElasticMaxBytes ? in.size() : kElasticMaxBytes;
  for (size_t i = 0; i < limit; ++i) {
    auto b = static_cast<uint8_t>(in[i]);
    v |= static_cast<uint64_t>(b & 0x7F) << (7 * i);
    if (b & 0x80) return {v, i + 1};
  }
  if (in.size() > kElasticMaxBytes)
    fail(Errc::Overlong, "no stop bit within 9 bytes");
  fail(Errc::Truncated, "stream ended before stop bit");
}

// Decodes a whole buffer of concatenated elastic values.
inline std::vector<uint64_t> elastic_decode_all(ByteView in) {
  std::vector<uint64_t> out;
  size_t pos = 0;
  while (pos < in.size()) {
    auto [v, used] = elastic_decode(in.substr(pos));
    out.push_back(v);
    pos += used;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Zigzag mapping: signed deltas to unsigned, small magnitudes stay small.
// zigzag(0)=0, zigzag(-1)=1, zigzag(1)=2, ...
// ---------------------------------------------------------------------------

inline uint64_t zigzag(int64_t d) {
  return (static_cast<uint64_t>(d) << 1) ^ static_cast<uint64_t>(d >> 63);
}

inline int64_t unzigzag(uint64_t u) {
  return static_cast<int64_t>(u >> 1) ^ -static_cast<int64_t>(u & 1);
}

// ---------------------------------------------------------------------------
// Delta transform: first value plus successive signed differences.
// Differences use two's-complement wraparound, so the transform is a
// bijection on arbitrary uint64 sequences; serialized streams stay within
// the elastic cap because tag values are bounded by 10^15.
// ---------------------------------------------------------------------------

struct DeltaStream {
  uint64_t first = 0;
  std::vector<int64_t> deltas;
};

inline DeltaStream delta_encode(std::span<const uint64_t> values) {
  if (values.empty()) fail(Errc::EmptyInput, "delta_encode needs at least one value");
  DeltaStream s;
  s.first = values[0];
  s.deltas.reserve(values.size() - 1);
  for (size_t i = 1; i < values.size(); ++i)
    s.deltas.push_back(static_cast<int64_t>(values[i] - values[i - 1]));
  return s;
}

inline std::vector<uint64_t> delta_decode(const DeltaStream& s) {
  std::vector<uint64_t> values;
  values.reserve(s.deltas.size() + 1);
  values.push_back(s.first);
  uint64_t cur = s.first;
  for (int64_t d : s.deltas) {
    cur += static_cast<uint64_t>(d);
    values.push_back(cur);
  }
  return values;
}

inline void delta_serialize(Bytes& out, const DeltaStream& s) {
  elastic_append(out, s.first);
  for (int64_t d : s.deltas) elastic_append(out, zigzag(d));
}

inline std::vector<uint64_t> delta_parse(ByteView payload) {
  auto raw = elastic_decode_all(payload);
  if (raw.empty()) fail(Errc::EmptyInput, "delta payload holds no values");
  DeltaStream s;
  s.first = raw[0];
  s.deltas.reserve(raw.size() - 1);
  for (size_t i = 1; i < raw.size(); ++i) s.deltas.push_back(unzigzag(raw[i]));
  return delta_decode(s);
}

}  // namespace denum
