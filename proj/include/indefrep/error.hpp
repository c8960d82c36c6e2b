#pragma once

#include <stdexcept>
#include <string>

namespace indefrep {

enum class ErrorKind {
  input,       // malformed or inadmissible input (exit code 2)
  domain,      // function applied outside its domain
  hypothesis,  // gap hypothesis refused and no bypass requested
  internal,    // an identity that must hold failed beyond tolerance
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string module, const std::string& message)
      : std::runtime_error("[" + module + "] " + message),
        kind_(kind),
        module_(std::move(module)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& module() const noexcept { return module_; }

 private:
  ErrorKind kind_;
  std::string module_;
};

}  // namespace indefrep
