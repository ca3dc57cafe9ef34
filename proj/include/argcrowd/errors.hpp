#ifndef ARGCROWD_ERRORS_HPP
#define ARGCROWD_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace argcrowd {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed standoff line. `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Span outside the document, or quoted surface text that does not match.
class OffsetError : public Error {
 public:
  OffsetError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class UnknownLabelError : public Error {
 public:
  using Error::Error;
};

class OverlapError : public Error {
 public:
  using Error::Error;
};

/// Input too small for the requested statistic (e.g. fewer than two annotators).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class MissingGold : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage ran before the stage producing its inputs.
class MissingStage : public Error {
 public:
  using Error::Error;
};

}  // namespace argcrowd

#endif  // ARGCROWD_ERRORS_HPP
