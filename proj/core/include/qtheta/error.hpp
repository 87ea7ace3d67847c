#pragma once

#include <stdexcept>
#include <string>

namespace qtheta {

enum class ErrorCode {
  DivisionByZero,
  NotInvertible,
  NotSymmetric,
  DimensionMismatch,
  FieldMismatch,
  NotMultipliable,
  ParamMismatch,
  NotComposable,
  DegenerateAlpha,
  LatticeMismatch,
  Indivisible,
  IncompatibleQuantization,
  NotInImage,
  NonSymmetricPairing,
  CocycleFailure,
  SqrtMismatch,
  InconsistentRecurrence,
  InfiniteIndex,
  NoLift,
  IncompatibleForm,
  NonInjectiveImage,
  MissingRootsOfUnity,
  DimensionDeficit,
  NotInNormalizer,
  NotAmple,
  Unrepresentable,
  UnknownName,
  UnresolvedReference,
  InvalidArgument,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace qtheta
