#pragma once

#include <stdexcept>
#include <string>

namespace cfss {

enum class ErrorKind {
  usage,
  domain,
  capacity,
  insufficient_shares,
  inconsistent_shares,
  corrupt_side_info,
  internal,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::domain: return "domain";
    case ErrorKind::capacity: return "capacity";
    case ErrorKind::insufficient_shares: return "insufficient-shares";
    case ErrorKind::inconsistent_shares: return "inconsistent-shares";
    case ErrorKind::corrupt_side_info: return "corrupt-side-info";
    case ErrorKind::internal: return "internal";
  }
  return "unknown";
}

// Every failure raised by the library carries one of the kinds above so the
// CLI can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const char* what) {
  if (!condition) fail(kind, what);
}

}  // namespace cfss
