#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pogc {

enum class ErrorCode {
  NonSeriesParallel,
  DisconnectedSegment,
  MultiPortSegment,
  CausalityConflict,
  SignInconsistency,
  AlgebraicLoop,
  SingularEnergyMatrix,
  PoleAtS,
  SingularT,
  SideConditionViolated,
  MissingTdot,
  NonEliminable,
  NonFiniteState,
  IncompatibleLabels,
  ValidationFailed,
  InvalidModel,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonSeriesParallel: return "NonSeriesParallel";
    case ErrorCode::DisconnectedSegment: return "DisconnectedSegment";
    case ErrorCode::MultiPortSegment: return "MultiPortSegment";
    case ErrorCode::CausalityConflict: return "CausalityConflict";
    case ErrorCode::SignInconsistency: return "SignInconsistency";
    case ErrorCode::AlgebraicLoop: return "AlgebraicLoop";
    case ErrorCode::SingularEnergyMatrix: return "SingularEnergyMatrix";
    case ErrorCode::PoleAtS: return "PoleAtS";
    case ErrorCode::SingularT: return "SingularT";
    case ErrorCode::SideConditionViolated: return "SideConditionViolated";
    case ErrorCode::MissingTdot: return "MissingTdot";
    case ErrorCode::NonEliminable: return "NonEliminable";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::IncompatibleLabels: return "IncompatibleLabels";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

// Model-level failure. `subjects` names the elements, states or loops involved.
class ModelError : public std::runtime_error {
 public:
  ModelError(ErrorCode code, const std::string& message, std::vector<std::string> subjects = {})
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        subjects_(std::move(subjects)) {}

  ErrorCode code() const { return code_; }
  const std::vector<std::string>& subjects() const { return subjects_; }

 private:
  ErrorCode code_;
  std::vector<std::string> subjects_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                           ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace pogc
