#include "qtheta/error.hpp"

namespace qtheta {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::FieldMismatch: return "FieldMismatch";
    case ErrorCode::NotMultipliable: return "NotMultipliable";
    case ErrorCode::ParamMismatch: return "ParamMismatch";
    case ErrorCode::NotComposable: return "NotComposable";
    case ErrorCode::DegenerateAlpha: return "DegenerateAlpha";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::Indivisible: return "Indivisible";
    case ErrorCode::IncompatibleQuantization: return "IncompatibleQuantization";
    case ErrorCode::NotInImage: return "NotInImage";
    case ErrorCode::NonSymmetricPairing: return "NonSymmetricPairing";
    case ErrorCode::CocycleFailure: return "CocycleFailure";
    case ErrorCode::SqrtMismatch: return "SqrtMismatch";
    case ErrorCode::InconsistentRecurrence: return "InconsistentRecurrence";
    case ErrorCode::InfiniteIndex: return "InfiniteIndex";
    case ErrorCode::NoLift: return "NoLift";
    case ErrorCode::IncompatibleForm: return "IncompatibleForm";
    case ErrorCode::NonInjectiveImage: return "NonInjectiveImage";
    case ErrorCode::MissingRootsOfUnity: return "MissingRootsOfUnity";
    case ErrorCode::DimensionDeficit: return "DimensionDeficit";
    case ErrorCode::NotInNormalizer: return "NotInNormalizer";
    case ErrorCode::NotAmple: return "NotAmple";
    case ErrorCode::Unrepresentable: return "Unrepresentable";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::UnresolvedReference: return "UnresolvedReference";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace qtheta
