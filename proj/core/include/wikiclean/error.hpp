#pragma once

#include <stdexcept>
#include <string>

namespace wikiclean {

/// Failure categories; each maps onto one CLI exit code.
enum class ErrorKind {
  Usage = 1,       ///< bad flags, config, or parameters
  Data = 2,        ///< malformed or inconsistent input data
  Degenerate = 3,  ///< a score distribution admits no threshold
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::Usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorKind::Degenerate, what) {}
};

}  // namespace wikiclean
