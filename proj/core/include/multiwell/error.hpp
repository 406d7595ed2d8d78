#pragma once

#include <stdexcept>
#include <string>

namespace multiwell {

/// Failure classes surfaced to callers. The CLI maps `Config` to exit code 2
/// and everything else to exit code 1.
enum class ErrorKind {
  Config,        ///< malformed input, violated precondition
  NotMultiWell,  ///< fewer than two nondegenerate minima
  NotSameLevel,  ///< minima at different potential levels
  Numeric,       ///< integration / fit / eigensolve failure
  Inconsistent,  ///< cross-checks between independent routes disagree
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return "config";
    case ErrorKind::NotMultiWell: return "not-multi-well";
    case ErrorKind::NotSameLevel: return "not-same-level";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Inconsistent: return "inconsistent";
  }
  return "unknown";
}

}  // namespace multiwell
