#pragma once

#include <stdexcept>
#include <string>

namespace treespark {

// Base for every error the library raises. The CLI maps the subclasses
// onto its stable exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Graph fails a structural invariant (disconnected, self-loop, bad weight).
class GraphInvalid : public Error {
 public:
  using Error::Error;
};

// An exhaustive routine was asked to run on an input past its guard.
class SizeGuard : public Error {
 public:
  using Error::Error;
};

class ContractViolation : public Error {
 public:
  using Error::Error;
};

class NotPsd : public Error {
 public:
  using Error::Error;
};

// Conditioning on a probability-zero event, e.g. a cycle of tree edges.
class InvalidConditioning : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace treespark
