#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bellbound {

enum class ErrorKind {
  InvalidArgument,
  CapExceeded,
  ShapeMismatch,
  DimensionMismatch,
  NotBipartite,
  NotApplicable,
  NotInHull,
  ScenarioMismatch,
  WeightError,
  CyclicDependency,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotBipartite: return "NotBipartite";
    case ErrorKind::NotApplicable: return "NotApplicable";
    case ErrorKind::NotInHull: return "NotInHull";
    case ErrorKind::ScenarioMismatch: return "ScenarioMismatch";
    case ErrorKind::WeightError: return "WeightError";
    case ErrorKind::CyclicDependency: return "CyclicDependency";
  }
  return "Unknown";
}

/// Precondition or validation failure. Everything the library throws on bad
/// input derives from this; anything else escaping is an internal error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bellbound
