#pragma once

#include <stdexcept>
#include <string>

namespace ncsagree {

// Exit codes used by the CLI; library code throws, the CLI maps to codes.
enum class ExitCode : int {
  ok = 0,
  config = 2,
  ingest = 3,
  consistency = 4,
  degeneracy = 5,
  io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ExitCode exit_code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(ExitCode::config, msg) {}
};

class IngestError : public Error {
 public:
  explicit IngestError(const std::string& msg) : Error(ExitCode::ingest, msg) {}
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& msg)
      : Error(ExitCode::consistency, msg) {}
};

class DegeneracyError : public Error {
 public:
  explicit DegeneracyError(const std::string& msg)
      : Error(ExitCode::degeneracy, msg) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ExitCode::io, msg) {}
};

}  // namespace ncsagree
