#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kreinx {

enum class ErrorKind {
  OutsideResolventSet,
  SingularPencil,
  NotHermitian,
  DimensionMismatch,
  SpectrumHit,
  OracleDegenerate,
  InvalidModel,
  NonpositiveRadius,
  BranchCut,
  NonpositiveArgument,
  GridTooCoarse,
  SymbolRangeHit,
  TailEstimateFailed,
  InvalidSymbol,
  InvalidPointSet,
  IntervalOutsideResolventSet,
  NotAPole,
  EvaluationAtSingularity,
  UnsupportedAction,
  SchemaError,
  InvariantError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OutsideResolventSet: return "OutsideResolventSet";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SpectrumHit: return "SpectrumHit";
    case ErrorKind::OracleDegenerate: return "OracleDegenerate";
    case ErrorKind::InvalidModel: return "InvalidModel";
    case ErrorKind::NonpositiveRadius: return "NonpositiveRadius";
    case ErrorKind::BranchCut: return "BranchCut";
    case ErrorKind::NonpositiveArgument: return "NonpositiveArgument";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::SymbolRangeHit: return "SymbolRangeHit";
    case ErrorKind::TailEstimateFailed: return "TailEstimateFailed";
    case ErrorKind::InvalidSymbol: return "InvalidSymbol";
    case ErrorKind::InvalidPointSet: return "InvalidPointSet";
    case ErrorKind::IntervalOutsideResolventSet: return "IntervalOutsideResolventSet";
    case ErrorKind::NotAPole: return "NotAPole";
    case ErrorKind::EvaluationAtSingularity: return "EvaluationAtSingularity";
    case ErrorKind::UnsupportedAction: return "UnsupportedAction";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvariantError: return "InvariantError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kreinx
