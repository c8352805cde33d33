#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace odefilter {

enum class ErrorCode {
  InvalidArgument,
  NonConvergence,
  DimensionMismatch,
  MissingDerivative,
  MissingExact,
  DivergedEvaluation,
  SingularInnovation,
  NonIntegerMesh,
  InsufficientGrid,
  DegenerateFit,
  OracleNotConverged,
  ConfigError,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace odefilter
