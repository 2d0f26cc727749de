#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace yeefem {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Degenerate or inverted element / domain geometry.
class InvalidGeometry : public Error
{
public:
  using Error::Error;
};

/// Mesh violates a structural invariant (conformity, duplicate edges, tags).
class ValidationError : public Error
{
public:
  using Error::Error;
};

class ParseError : public Error
{
public:
  ParseError(const std::string& what, std::size_t line)
    : Error("line " + std::to_string(line) + ": " + what), line_(line)
  {
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// The lumped quadrature produced a non-positive or non-diagonal local mass.
class LumpingFailure : public Error
{
public:
  using Error::Error;
};

class BlowUpError : public Error
{
public:
  BlowUpError(const std::string& what, long step) : Error(what), step_(step) {}

  long step() const noexcept { return step_; }

private:
  long step_;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

} // namespace yeefem
