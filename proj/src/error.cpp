#include "polarpark/error.hpp"

namespace polarpark {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SingularOrigin: return "SingularOrigin";
    case ErrorCode::OutsideS1: return "OutsideS1";
    case ErrorCode::SingularRho: return "SingularRho";
    case ErrorCode::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorCode::GainConstraint: return "GainConstraint";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::WrongController: return "WrongController";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::MalformedInput: return "MalformedInput";
  }
  return "Unknown";
}

}  // namespace polarpark
