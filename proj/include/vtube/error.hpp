#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vtube {

enum class ErrorKind {
  PreconditionViolation,
  DegenerateCenterline,
  NonPositiveWidth,
  CoincidentEndpoints,
  NumericalBlowup,
  TrayAltitudeSingularity,
  LoadAltitudeSingularity,
  CoincidentNodes,
  OutsideTube,
  BoundaryContact,
  ParseError,
  ValidationError,
  EmptyRecord,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Single exception type for the library; `kind()` identifies the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const char* message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace vtube
