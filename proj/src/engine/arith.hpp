#pragma once

#include <stdexcept>
#include <string>

#include "prologian/engine/engine.hpp"
#include "store.hpp"

namespace prologian::detail {

/// Raised by evaluate(); the machine adds call-site context.
struct ArithError {
  RuntimeError::Kind kind;
  std::string message;
};

Number evaluate(const Store& store, Idx expr);

/// -1, 0 or 1; exact comparison, mixing integers and floats numerically.
int compare_numbers(const Number& a, const Number& b);

Cell number_cell(const Number& n);

}  // namespace prologian::detail
