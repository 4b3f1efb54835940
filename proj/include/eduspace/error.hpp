#pragma once

#include <stdexcept>
#include <string>

namespace eduspace {

enum class ErrorCode {
  // data loading / validation
  MissingColumn,
  ParseError,
  DuplicateId,
  UnknownRegion,
  // numeric contracts
  NonFinite,
  EmptySchool,
  TooFewPoints,
  ShapeMismatch,
  SingleCluster,
  AmbiguousLabeling,
  ConstantColumn,
  DegenerateCovariance,
  ModelNotFitted,
  MissingCluster,
  CollinearColumn,
  Separation,
  SingularInformation,
  NotConverged,
  LengthMismatch,
  // environment
  InvalidConfig,
  MissingArtifact,
  IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::UnknownRegion: return "UnknownRegion";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::EmptySchool: return "EmptySchool";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::SingleCluster: return "SingleCluster";
    case ErrorCode::AmbiguousLabeling: return "AmbiguousLabeling";
    case ErrorCode::ConstantColumn: return "ConstantColumn";
    case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
    case ErrorCode::ModelNotFitted: return "ModelNotFitted";
    case ErrorCode::MissingCluster: return "MissingCluster";
    case ErrorCode::CollinearColumn: return "CollinearColumn";
    case ErrorCode::Separation: return "Separation";
    case ErrorCode::SingularInformation: return "SingularInformation";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::MissingArtifact: return "MissingArtifact";
    case ErrorCode::IoError: return "IoError";
  }
  return "UnknownError";
}

// Exit code classes used by the CLI (documented in the README).
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitConfig = 2,
  kExitValidation = 3,
  kExitModel = 4,
  kExitIo = 5,
};

inline int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
      return kExitConfig;
    case ErrorCode::MissingColumn:
    case ErrorCode::ParseError:
    case ErrorCode::DuplicateId:
    case ErrorCode::UnknownRegion:
      return kExitValidation;
    case ErrorCode::IoError:
    case ErrorCode::MissingArtifact:
      return kExitIo;
    default:
      return kExitModel;
  }
}

}  // namespace eduspace
