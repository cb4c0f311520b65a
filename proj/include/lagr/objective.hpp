#pragma once

#include "lagr/polynomial.hpp"

#include <Eigen/Dense>

#include <vector>

namespace lagr {

/// coef * sqrt(x_var); defined for x_var >= 0.
struct RootTerm {
  int var = 0;
  double coef = 0.0;

  friend bool operator==(const RootTerm&, const RootTerm&) = default;
};

/// A polynomial plus an optional sum of square-root terms.
///
/// Root terms model objectives that are continuous but not L-smooth at the
/// origin. On binary coordinates sqrt(x) = x, so they fold into the
/// polynomial under binary reduction.
struct Objective {
  Polynomiald poly;
  std::vector<RootTerm> roots;

  Objective() = default;
  Objective(Polynomiald p) : poly(std::move(p)) {}  // NOLINT: implicit by intent
  Objective(Polynomiald p, std::vector<RootTerm> r) : poly(std::move(p)), roots(std::move(r)) {}

  int nvars() const { return poly.nvars(); }
  bool is_polynomial() const { return roots.empty(); }

  double operator()(const Eigen::VectorXd& x) const { return value(x); }

  double value(const Eigen::VectorXd& x) const;

  /// Analytic gradient. Root-term slopes are evaluated at max(x, kRootFloor)
  /// so the gradient stays finite on the boundary x = 0.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;

  Objective& operator+=(const Polynomiald& p) {
    poly += p;
    return *this;
  }

  Objective reduce_binary(const std::vector<int>& binary) const;

  static constexpr double kRootFloor = 1e-16;
};

inline Objective operator+(Objective o, const Polynomiald& p) { return o += p; }

}  // namespace lagr
