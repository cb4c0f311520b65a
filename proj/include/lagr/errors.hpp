#pragma once

#include <stdexcept>
#include <string>

namespace lagr {

/// Malformed input file or inconsistent dimensions in a model.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// X intersected with H is empty, so (P)* = +inf.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The certified path needs X \ H closed; raised for continuous X where that
/// cannot be established.
struct NotClosed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An enumeration would visit more points than the configured cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Some h_j takes a negative value on X.
struct NonnegativityViolated : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The requested reformulation or solver does not apply to the input.
struct ModeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Escalation values exceeded every bound a feasible problem allows.
struct Diverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace lagr
