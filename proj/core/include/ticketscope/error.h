#pragma once

#include <stdexcept>
#include <string>

namespace ticketscope {

// Base of every error the library raises. Subclasses let the service layer
// map failures onto HTTP status codes without string matching.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input files, flags, or request bodies that violate a documented contract.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// A referenced entity (ticket id, node, word, model) does not exist.
class NotFound : public Error {
 public:
  using Error::Error;
};

// A query carries no usable information after cleaning (all tokens OOV).
class DegenerateQuery : public Error {
 public:
  using Error::Error;
};

// Model store artifacts were built from a different corpus.
class StoreMismatch : public Error {
 public:
  using Error::Error;
};

// Flattens a (possibly nested) exception into "outer\n  caused by: inner".
std::string describe_exception(const std::exception& e);

}  // namespace ticketscope
