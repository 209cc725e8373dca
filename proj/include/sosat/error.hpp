#pragma once

#include <stdexcept>
#include <string>

namespace sosat {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
public:
  SyntaxError(const std::string &msg, unsigned line, unsigned column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line), column_(column) {}

  unsigned line() const { return line_; }
  unsigned column() const { return column_; }

private:
  unsigned line_;
  unsigned column_;
};

class UnsupportedWidth : public Error {
public:
  using Error::Error;
};

class MalformedProgram : public Error {
public:
  using Error::Error;
};

class UnknownSymbol : public Error {
public:
  using Error::Error;
};

class ArityMismatch : public Error {
public:
  using Error::Error;
};

class CapacityError : public Error {
public:
  using Error::Error;
};

class BackendUnavailable : public Error {
public:
  using Error::Error;
};

class BackendTimeout : public Error {
public:
  using Error::Error;
};

class DecodeMismatch : public Error {
public:
  using Error::Error;
};

/// Raised for operations the bit-blaster cannot encode (floating point).
class Unsupported : public Error {
public:
  using Error::Error;
};

/// An internal consistency check failed (e.g. a repeated counterexample).
class InternalError : public Error {
public:
  using Error::Error;
};

} // namespace sosat
