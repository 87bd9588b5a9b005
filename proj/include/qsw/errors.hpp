#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace qsw {

// Exit codes surfaced by the CLI (0 = success).
enum ExitCode : int {
  kExitUsage = 2,
  kExitConstruction = 3,
  kExitIntegrator = 4,
  kExitIo = 5,
};

class Error : public std::runtime_error {
 public:
  Error(std::string msg, int code) : std::runtime_error(std::move(msg)), code_(code) {}
  int exit_code() const { return code_; }

 private:
  int code_;
};

// bad flags, bad config keys, invalid parameter values
class UsageError : public Error {
 public:
  explicit UsageError(std::string msg) : Error(std::move(msg), kExitUsage) {}
};

// graph construction / rewiring / perturbation failures
class ConstructionError : public Error {
 public:
  explicit ConstructionError(std::string msg) : Error(std::move(msg), kExitConstruction) {}
};

class PerturbationError : public ConstructionError {
 public:
  PerturbationError(std::string msg, int achieved)
      : ConstructionError(std::move(msg)), achieved_(achieved) {}
  int achieved() const { return achieved_; }

 private:
  int achieved_;
};

// numerical blow-up, non-finite state, broken invariants during integration
class IntegratorError : public Error {
 public:
  explicit IntegratorError(std::string msg) : Error(std::move(msg), kExitIntegrator) {}
};

class IoError : public Error {
 public:
  explicit IoError(std::string msg) : Error(std::move(msg), kExitIo) {}
};

class PlotError : public IoError {
 public:
  using IoError::IoError;
};

}  // namespace qsw
