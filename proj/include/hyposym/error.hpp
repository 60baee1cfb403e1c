#pragma once

#include <stdexcept>
#include <string>

namespace hyposym {

// Every failure carries a short machine-readable code ("empty-region",
// "graphs-cross", ...) in addition to the human-readable message.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}

  explicit Error(std::string code) : std::runtime_error(code), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

} // namespace hyposym
