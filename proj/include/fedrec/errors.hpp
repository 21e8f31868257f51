#pragma once

#include <stdexcept>
#include <string>

namespace fedrec {

// Error taxonomy mirrors the CLI exit codes: config -> 1, data -> 2,
// numeric -> 3. Anything else escaping main is a bug.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fedrec
