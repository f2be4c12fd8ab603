#include "agni/error.hpp"

namespace agni {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Range: return "range";
    case ErrorKind::Config: return "config";
    case ErrorKind::MalformedUnary: return "malformed-unary";
    case ErrorKind::Format: return "format";
    case ErrorKind::Calibration: return "calibration";
    case ErrorKind::Arity: return "arity";
    case ErrorKind::UndefinedMetric: return "undefined-metric";
    case ErrorKind::ResourceGuard: return "resource-guard";
    case ErrorKind::Unavailable: return "unavailable";
    case ErrorKind::InterpolationRange: return "interpolation-range";
    case ErrorKind::Schedule: return "schedule";
  }
  return "unknown";
}

}  // namespace agni
