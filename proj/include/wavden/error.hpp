#pragma once

#include <stdexcept>
#include <string>

namespace wavden {

// Error with a stable machine-parsable category ("io.not_found", "nn.size", ...).
// The CLI maps categories to exit codes; library callers can branch on them.
class Error : public std::runtime_error {
public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(category + ": " + message), category_(std::move(category)) {}

  const std::string& category() const { return category_; }

private:
  std::string category_;
};

[[noreturn]] inline void fail(const std::string& category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace wavden
