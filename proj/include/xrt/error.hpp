#pragma once

#include <stdexcept>
#include <string>

namespace xrt {

enum class ErrorKind {
  dimension,
  domain,
  degenerate,
  nonnegativity,
  division,
  plan,
  side,
  fit,
  format,
  parse,
};

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace xrt
