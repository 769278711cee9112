#pragma once

#include <stdexcept>
#include <string>

namespace charforge {

// Base of every error the library throws. The CLI maps the concrete type to
// an exit status (config -> 1, everything else -> 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// A requested stage or artifact does not exist in the store.
class NotFoundError : public DataError {
 public:
  NotFoundError(std::string what, std::string missing_stage)
      : DataError(std::move(what)), stage_(std::move(missing_stage)) {}

  // Name of the pipeline stage that has to run first.
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace charforge
