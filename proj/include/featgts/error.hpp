#pragma once

#include <stdexcept>
#include <string>

namespace featgts {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind : int {
  Parse = 64,
  Consistency = 65,
  InvalidConfiguration = 66,
  Runtime = 70,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace featgts
