#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace femtet {

/// Failure categories surfaced by the library. The CLI maps these to exit
/// codes; tests match on them instead of on message text.
enum class ErrorKind {
  // msh_reader
  UnsupportedVersion,
  BinaryNotSupported,
  MalformedSection,
  UnsupportedElementType,
  DuplicateNodeId,
  DegreeMismatch,
  MixedDegrees,
  // ref_element / quadrature
  UnsupportedDegree,
  DegreeTooHigh,
  // mesh_model
  DegenerateElement,
  NegativeOrientation,
  NonConformal,
  UnknownGroup,
  // coeff_lang
  SyntaxError,
  UnknownIdentifier,
  NonFiniteValue,
  // assembly / solver
  ShapeMismatch,
  NoConvergence,
  BreakdownDetected,
  SingularSystem,
  // postprocess
  UnlocatedPoint,
  IoError,
  // cli
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace femtet
