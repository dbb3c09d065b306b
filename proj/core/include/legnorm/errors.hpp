#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace legnorm {

// Root of every error the library throws. `kind()` is a stable short tag
// used in reports ("SingularMetric", "NullOmega", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::vector<std::string> expected,
              const std::string& found);
  std::size_t position() const noexcept { return position_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t position_;
  std::vector<std::string> expected_;
};

class UnknownFunction : public Error {
 public:
  explicit UnknownFunction(const std::string& name)
      : Error("UnknownFunction", "unknown function '" + name + "'") {}
};

class UnknownVariable : public Error {
 public:
  explicit UnknownVariable(const std::string& name)
      : Error("UnknownVariable", "unknown variable '" + name + "'") {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error("DomainError", what) {}
};

class IndexOutOfRange : public Error {
 public:
  explicit IndexOutOfRange(const std::string& what)
      : Error("IndexOutOfRange", what) {}
};

class SingularMatrix : public Error {
 public:
  explicit SingularMatrix(const std::string& what = "matrix is singular")
      : Error("SingularMatrix", what) {}
};

class SingularMetric : public Error {
 public:
  explicit SingularMetric(const std::string& what)
      : Error("SingularMetric", what) {}
};

class NullOmega : public Error {
 public:
  explicit NullOmega(const std::string& what) : Error("NullOmega", what) {}
};

class NotSymmetric : public Error {
 public:
  explicit NotSymmetric(const std::string& what) : Error("NotSymmetric", what) {}
};

class NotDegenerate : public Error {
 public:
  explicit NotDegenerate(const std::string& what)
      : Error("NotDegenerate", what) {}
};

class SingularResult : public Error {
 public:
  explicit SingularResult(const std::string& what)
      : Error("SingularResult", what) {}
};

class IndexOutOfDomain : public Error {
 public:
  explicit IndexOutOfDomain(const std::string& what)
      : Error("IndexOutOfDomain", what) {}
};

class NonIntegerResult : public Error {
 public:
  explicit NonIntegerResult(const std::string& what)
      : Error("NonIntegerResult", what) {}
};

class TruncationExceeded : public Error {
 public:
  explicit TruncationExceeded(const std::string& what)
      : Error("TruncationExceeded", what) {}
};

class FileError : public Error {
 public:
  explicit FileError(const std::string& what) : Error("FileError", what) {}
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& reason)
      : Error("FormatError",
              (line ? "line " + std::to_string(line) + ": " : std::string()) +
                  reason),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace legnorm
