#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace poa {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed instance: bad ids, non-chaining paths, invalid cost parameters.
class ModelError : public Error {
 public:
  using Error::Error;
};

// Argument outside the declared domain of a function (negative load on an
// unextended cost, t outside the demand curve's domain, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// The social optimum reduction needs x * c(x) convex on every edge.
class NonConvexError : public Error {
 public:
  using Error::Error;
};

// Regime-level failures: a regime missing an OD pair, or a regime that is
// not locally constant on the probed side of a breakpoint.
class RegimeError : public Error {
 public:
  using Error::Error;
};

// A Newton system whose Jacobian is singular in load directions; carries the
// undirected cycle of zero-derivative edges responsible for it.
class SingularJacobianError : public ConvergenceError {
 public:
  SingularJacobianError(const std::string& what, std::vector<std::string> cycle)
      : ConvergenceError(what), cycle_(std::move(cycle)) {}
  const std::vector<std::string>& cycle() const { return cycle_; }

 private:
  std::vector<std::string> cycle_;
};

// Malformed instance file; the message names the offending field.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Target of a flow reconstruction not attainable from any flow.
class AttainabilityError : public Error {
 public:
  AttainabilityError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace poa
