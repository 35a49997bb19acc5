#pragma once

#include <stdexcept>
#include <string>

namespace iccon {

/// Invalid parameters or malformed configuration. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// I/O and other runtime failures. The CLI maps this to exit code 3.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace iccon
