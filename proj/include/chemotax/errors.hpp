#pragma once

#include <stdexcept>

namespace chemotax {

// Malformed user input: bad parameters, bad grids, unparseable config.
// The CLI maps this to exit code 2.
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// The requested construction has no solution for these parameters
// (blow-up criterion fails, constant chain infeasible, unordered pair).
// The CLI maps this to exit code 1.
struct infeasible_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value exceeds double range in linear space; the caller should switch
// to the log-space interface or to toy-mode overrides. Exit code 1.
struct not_representable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace chemotax
