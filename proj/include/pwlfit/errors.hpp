#pragma once

#include <stdexcept>

namespace pwlfit {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
struct invalid_input : error {
  using error::error;
};

// Segment budget M outside [1, N].
struct infeasible : error {
  using error::error;
};

// Malformed input data (CSV parsing, bad grid).
struct parse_error : error {
  using error::error;
};

// Refused because an explicit safety guard would be exceeded.
struct guard_error : error {
  using error::error;
};

// An internal invariant failed; indicates a bug, not bad input.
struct internal_error : error {
  using error::error;
};

}  // namespace pwlfit
