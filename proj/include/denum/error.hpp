#pragma once

#include <stdexcept>
#include <string>

namespace denum {

enum class Errc {
  Overflow,
  Truncated,
  Overlong,
  EmptyInput,
  OutOfRange,
  UnknownUppercaseTag,
  QueueUnderflow,
  IdOutOfRange,
  BadMagic,
  FingerprintMismatch,
  Corrupt,
  BackendUnavailable,
  BadRegistry,
  IoError,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::Overflow: return "Overflow";
    case Errc::Truncated: return "Truncated";
    case Errc::Overlong: return "Overlong";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::UnknownUppercaseTag: return "UnknownUppercaseTag";
    case Errc::QueueUnderflow: return "QueueUnderflow";
    case Errc::IdOutOfRange: return "IdOutOfRange";
    case Errc::BadMagic: return "BadMagic";
    case Errc::FingerprintMismatch: return "FingerprintMismatch";
    case Errc::Corrupt: return "Corrupt";
    case Errc::BackendUnavailable: return "BackendUnavailable";
    case Errc::BadRegistry: return "BadRegistry";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace denum
