#pragma once

#include <stdexcept>
#include <string>

namespace iodnet {

/// Failure raised by library operations. `code()` is a stable identifier
/// (e.g. "unknown-diagram", "time-deadlock") suitable for scripting.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

enum class Severity { error, warning };

inline const char* to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

} // namespace iodnet
