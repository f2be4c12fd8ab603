#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace agni {

enum class ErrorKind {
  Range,
  Config,
  MalformedUnary,
  Format,
  Calibration,
  Arity,
  UndefinedMetric,
  ResourceGuard,
  Unavailable,
  InterpolationRange,
  Schedule,
};

std::string_view to_string(ErrorKind kind);

// All recoverable failures in the library are reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace agni
