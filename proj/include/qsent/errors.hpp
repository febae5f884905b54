#pragma once

#include <stdexcept>
#include <string>

namespace qsent {

// Bad configuration (invalid regex rule, missing stop-word file, bad CLI
// config). CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string &msg) : std::runtime_error(msg) {}
};

// Bad or degenerate input data (malformed CSV, single-class labels,
// over-compressed split). CLI maps this to exit code 2.
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

} // namespace qsent
