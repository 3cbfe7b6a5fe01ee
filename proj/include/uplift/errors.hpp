#pragma once

#include <stdexcept>
#include <string>

namespace uplift {

struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Header/schema problems: missing or duplicated columns.
struct SchemaError : Error {
  using Error::Error;
};

// Malformed file content; messages carry row/column context.
struct ParseError : Error {
  using Error::Error;
};

// Well-formed input that breaks a domain invariant (non-binary outcome,
// empty treatment arm, degenerate categorical column, ...).
struct ValidationError : Error {
  using Error::Error;
};

// Bad arguments to an operation (unknown column, nb_group < 2, ...).
struct ArgError : Error {
  using Error::Error;
};

// Numerical failure, e.g. a rank-deficient design.
struct NumericError : Error {
  using Error::Error;
};

}  // namespace uplift
