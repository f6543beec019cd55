#pragma once

#include <stdexcept>
#include <string>

namespace riskplan {

/// Broad failure classes. The CLI maps them onto exit codes 1, 2 and 3.
enum class ErrorKind {
  kValidation,
  kIo,
  kAdapter,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error ValidationError(const std::string& what) {
  return Error(ErrorKind::kValidation, what);
}
inline Error IoError(const std::string& what) {
  return Error(ErrorKind::kIo, what);
}
inline Error AdapterError(const std::string& what) {
  return Error(ErrorKind::kAdapter, what);
}

}  // namespace riskplan
