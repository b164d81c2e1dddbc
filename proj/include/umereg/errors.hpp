#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace umereg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (empty cloud, size mismatch, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Covariance or moment set is rank deficient.
class DegenerateGeometry : public Error {
 public:
  explicit DegenerateGeometry(const std::string& what, std::vector<std::string> flags = {})
      : Error(what), flags_(std::move(flags)) {}
  const std::vector<std::string>& flags() const noexcept { return flags_; }

 private:
  std::vector<std::string> flags_;
};

class DegenerateCorrespondence : public DegenerateGeometry {
 public:
  using DegenerateGeometry::DegenerateGeometry;
};

class InsufficientFeatures : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ResampleExhausted : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. line() is 1-based, 0 when not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace umereg
