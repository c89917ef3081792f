#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace twtsp {

enum class Errc {
  DisconnectedGraph,
  NonPositiveEdge,
  VertexOutOfRange,
  InvalidRequest,
  InfeasibleWalk,
  IndexOutOfRange,
  KindMismatch,
  SizeMismatch,
  StateBudgetExceeded,
  TooManyTargets,
  TooManyJobs,
  ServiceExceedsWindow,
  WindowTooSmall,
  ServiceExceedsDiameter,
  InfeasiblePrecomputedWalk,
  InvalidParams,
  TargetsViolateAssumptions,
  BadSuiteFile,
  ParseError,
};

inline const char* to_string(Errc code) {
  switch (code) {
    case Errc::DisconnectedGraph: return "DisconnectedGraph";
    case Errc::NonPositiveEdge: return "NonPositiveEdge";
    case Errc::VertexOutOfRange: return "VertexOutOfRange";
    case Errc::InvalidRequest: return "InvalidRequest";
    case Errc::InfeasibleWalk: return "InfeasibleWalk";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::KindMismatch: return "KindMismatch";
    case Errc::SizeMismatch: return "SizeMismatch";
    case Errc::StateBudgetExceeded: return "StateBudgetExceeded";
    case Errc::TooManyTargets: return "TooManyTargets";
    case Errc::TooManyJobs: return "TooManyJobs";
    case Errc::ServiceExceedsWindow: return "ServiceExceedsWindow";
    case Errc::WindowTooSmall: return "WindowTooSmall";
    case Errc::ServiceExceedsDiameter: return "ServiceExceedsDiameter";
    case Errc::InfeasiblePrecomputedWalk: return "InfeasiblePrecomputedWalk";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::TargetsViolateAssumptions: return "TargetsViolateAssumptions";
    case Errc::BadSuiteFile: return "BadSuiteFile";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library. `code()` identifies the failure
/// class; the message carries the details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised by the exact solvers when the estimated state count exceeds the
/// configured budget.
class BudgetExceeded : public Error {
 public:
  BudgetExceeded(std::uint64_t required, std::uint64_t budget)
      : Error(Errc::StateBudgetExceeded,
              "required " + std::to_string(required) + " states, budget " + std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const noexcept { return required_; }
  std::uint64_t budget() const noexcept { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

}  // namespace twtsp
