#pragma once

#include <stdexcept>
#include <string>

namespace tritree {

// Base for every error the library throws on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text: CSV cells, tree documents, config strings.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Well-formed input that violates a data or model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Column/target naming problems.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace tritree
