#ifndef OIEKIT_ERROR_H_
#define OIEKIT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oiekit {

// Base class for every error raised by the toolkit. Each subclass names one
// failure kind so callers can catch precisely what they aggregate.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text that cannot be parsed. Carries an optional source:line context.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& message) : Error(message) {}
  FormatError(const std::string& source, std::size_t line,
              const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message),
        source_(source),
        line_(line) {}

  const std::string& source() const { return source_; }
  std::size_t line() const { return line_; }

 private:
  std::string source_;
  std::size_t line_ = 0;
};

class MissingPredicate : public Error {
 public:
  using Error::Error;
};

class MalformedBio : public Error {
 public:
  using Error::Error;
};

class AlignmentMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownTag : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class DegenerateTuple : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace oiekit

#endif  // OIEKIT_ERROR_H_
