#pragma once

#include <stdexcept>
#include <string>

namespace entrobound {

//! Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
  //! Short machine-readable category, e.g. "domain" or "validity".
  virtual const char* kind() const noexcept { return "error"; }
};

//! An argument lies outside the mathematical domain of an operation.
class DomainError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "domain"; }
};

//! The confidence bound does not apply (quantization too coarse for L).
class ValidityError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "validity"; }
};

//! A sample coordinate lies outside the unit cube (or the declared box).
class OutOfSupportError : public DomainError
{
public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "out_of_support"; }
};

class EmptySampleError : public DomainError
{
public:
  using DomainError::DomainError;
  const char* kind() const noexcept override { return "empty_sample"; }
};

//! Quadrature did not reach the requested tolerance.
class ConvergenceError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "convergence"; }
};

//! An adversarial construction needs a parameter that doubles cannot hold.
class InfeasibleError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "infeasible"; }
};

class IoError : public Error
{
public:
  using Error::Error;
  const char* kind() const noexcept override { return "io"; }
};

//! Malformed input file; the message names the line or byte offset.
class ParseError : public IoError
{
public:
  using IoError::IoError;
  const char* kind() const noexcept override { return "parse"; }
};

} // namespace entrobound
