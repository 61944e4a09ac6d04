#pragma once

#include <stdexcept>
#include <string>

namespace corf {

// Coarse error classes; the CLI maps them onto exit codes.
enum class ErrorKind {
  contract,     // caller violated a documented precondition
  input,        // malformed or inconsistent user data
  convergence,  // an iterative fit did not converge
  io,           // filesystem or container-format failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what) : Error(ErrorKind::contract, what) {}
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

class ConvergenceError : public Error {
 public:
  explicit ConvergenceError(const std::string& what) : Error(ErrorKind::convergence, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

#define CORF_REQUIRE(cond, msg)                 \
  do {                                          \
    if (!(cond)) throw ::corf::ContractError(msg); \
  } while (false)

}  // namespace corf
