#include "vtube/error.hpp"

namespace vtube {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::DegenerateCenterline: return "DegenerateCenterline";
    case ErrorKind::NonPositiveWidth: return "NonPositiveWidth";
    case ErrorKind::CoincidentEndpoints: return "CoincidentEndpoints";
    case ErrorKind::NumericalBlowup: return "NumericalBlowup";
    case ErrorKind::TrayAltitudeSingularity: return "TrayAltitudeSingularity";
    case ErrorKind::LoadAltitudeSingularity: return "LoadAltitudeSingularity";
    case ErrorKind::CoincidentNodes: return "CoincidentNodes";
    case ErrorKind::OutsideTube: return "OutsideTube";
    case ErrorKind::BoundaryContact: return "BoundaryContact";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::EmptyRecord: return "EmptyRecord";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace vtube
