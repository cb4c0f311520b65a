#pragma once

#include "lagr/domain.hpp"
#include "lagr/polynomial.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>

namespace lagr {

enum class NonnegOracle { Exhaustive, Grid };

struct NonnegResult {
  bool pass = false;
  std::uint64_t checked = 0;
  /// Point where h(x) < -tol, present iff !pass.
  std::optional<Eigen::VectorXd> witness;
  double witness_value = 0.0;
};

struct NonnegOptions {
  double tol = 1e-9;
  int grid = kDefaultGrid;
  std::uint64_t cap = 1'000'000;
};

/// Checks h >= -tol on every point of the domain (exhaustive, binary only) or
/// of its grid. Throws CapExceeded when the point count exceeds the cap.
NonnegResult validate_nonneg(const Polynomiald& h, const VarDomain& domain, NonnegOracle oracle,
                             const NonnegOptions& opts = {});

}  // namespace lagr
