#pragma once

#include <stdexcept>
#include <string>

namespace ideaforge {

// Process exit codes used by the CLI.
enum class ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

// Input data that cannot be processed (bad files, empty corpora, unknown terms, ...).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ExitCode::kData, what) {}
};

// Numerical failure or broken internal invariant.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(ExitCode::kInternal, what) {}
};

}  // namespace ideaforge
