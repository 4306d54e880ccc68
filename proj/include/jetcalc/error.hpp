#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetcalc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed expression or scenario text. `position` is the 0-based offset
/// into the parsed text; `line` and `column` are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t position, std::size_t line = 1,
              std::size_t column = 0, std::string reason = {})
      : Error(what), position_(position), line_(line), column_(column ? column : position + 1),
        reason_(reason.empty() ? what : std::move(reason)) {}

  std::size_t position() const noexcept { return position_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  /// The message without its location prefix.
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t position_;
  std::size_t line_;
  std::size_t column_;
  std::string reason_;
};

/// Division by zero, log or sqrt outside their domain, singular matrices.
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnboundSymbol : public Error {
 public:
  explicit UnboundSymbol(const std::string& name)
      : Error("unbound symbol '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class UnknownCoordinate : public Error {
 public:
  explicit UnknownCoordinate(const std::string& name)
      : Error("unknown coordinate '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// Objects built over different charts were combined.
class ChartMismatch : public Error {
 public:
  using Error::Error;
};

/// Degree overflow in a wedge product or contraction of a 0-form.
class DegreeError : public Error {
 public:
  using Error::Error;
};

}  // namespace jetcalc
