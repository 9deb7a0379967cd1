#include "femtet/error.hpp"

#include <cmath>

#include "femtet/types.hpp"

namespace femtet {

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorKind::BinaryNotSupported: return "BinaryNotSupported";
    case ErrorKind::MalformedSection: return "MalformedSection";
    case ErrorKind::UnsupportedElementType: return "UnsupportedElementType";
    case ErrorKind::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorKind::DegreeMismatch: return "DegreeMismatch";
    case ErrorKind::MixedDegrees: return "MixedDegrees";
    case ErrorKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorKind::DegreeTooHigh: return "DegreeTooHigh";
    case ErrorKind::DegenerateElement: return "DegenerateElement";
    case ErrorKind::NegativeOrientation: return "NegativeOrientation";
    case ErrorKind::NonConformal: return "NonConformal";
    case ErrorKind::UnknownGroup: return "UnknownGroup";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BreakdownDetected: return "BreakdownDetected";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::UnlocatedPoint: return "UnlocatedPoint";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind) {}

}  // namespace femtet
