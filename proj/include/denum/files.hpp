#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>

#include "denum/error.hpp"
#include "denum/pipeline.hpp"

namespace denum {

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path.string());
  Bytes data;
  in.seekg(0, std::ios::end);
  auto size = in.tellg();
  if (size < 0) fail(Errc::IoError, "cannot stat " + path.string());
  data.resize(static_cast<size_t>(size));
  in.seekg(0);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (!in) fail(Errc::IoError, "short read on " + path.string());
  return data;
}

// Writes through a sibling temp file and renames into place, so a failed run
// never leaves a partial output behind.
inline void write_file_atomic(const std::filesystem::path& path, ByteView data) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoError, "cannot create " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) fail(Errc::IoError, "short write on " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    fail(Errc::IoError, "cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

// Tag group file names inside a preprocess directory: <db> -> tag_l_db.bin,
// <I> -> tag_u_I.bin, <*> -> tag_star.bin. The l/u prefix keeps lowercase and
// uppercase tags distinct on case-insensitive filesystems.
inline std::string tag_to_filename(std::string_view tag) {
  std::string_view inner = tag.substr(1, tag.size() - 2);
  if (inner == "*") return "tag_star.bin";
  std::string name = (inner[0] >= 'A' && inner[0] <= 'Z') ? "tag_u_" : "tag_l_";
  name += inner;
  name += ".bin";
  return name;
}

inline std::string filename_to_tag(std::string_view name) {
  if (name == "tag_star.bin") return "<*>";
  auto body = [&](std::string_view prefix) -> std::string_view {
    if (name.size() > prefix.size() + 4 && name.substr(0, prefix.size()) == prefix &&
        name.substr(name.size() - 4) == ".bin")
      return name.substr(prefix.size(), name.size() - prefix.size() - 4);
    return {};
  };
  std::string_view inner = body("tag_l_");
  if (inner.empty()) inner = body("tag_u_");
  if (inner.empty() || inner.size() > 2) fail(Errc::IoError, "unrecognized tag file " + std::string(name));
  return "<" + std::string(inner) + ">";
}

inline constexpr const char* kSkeletonFileName = "skeleton.txt";

inline void preprocess_write_dir(const std::filesystem::path& dir, const PreprocessResult& r) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::IoError, "cannot create " + dir.string() + ": " + ec.message());
  write_file_atomic(dir / kSkeletonFileName, r.skeleton_text);
  for (const auto& [tag, bytes] : r.group_files)
    write_file_atomic(dir / tag_to_filename(tag), bytes);
}

inline PreprocessResult preprocess_read_dir(const std::filesystem::path& dir) {
  PreprocessResult r;
  r.skeleton_text = read_file(dir / kSkeletonFileName);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string name = entry.path().filename().string();
    if (name.rfind("tag_", 0) != 0) continue;
    r.group_files.emplace(filename_to_tag(name), read_file(entry.path()));
  }
  return r;
}

}  // namespace denum
