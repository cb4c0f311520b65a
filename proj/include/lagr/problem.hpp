#pragma once

#include "lagr/domain.hpp"
#include "lagr/objective.hpp"
#include "lagr/polynomial.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace lagr {

struct LinearSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// An instance of min f(x) s.t. h_j(x) = 0, x in X (and A x = b when present).
struct ProblemSpec {
  Objective objective;
  std::vector<Polynomiald> equalities;
  VarDomain domain;
  std::optional<LinearSystem> linear;
  std::vector<std::string> names;

  int nvars() const { return objective.nvars(); }

  /// Throws ParseError on inconsistent dimensions.
  void validate() const;

  /// The h_j followed by one (A_k x - b_k)^2 per linear row. Every entry is
  /// nonnegative whenever the original h_j are.
  std::vector<Polynomiald> effective_equalities() const;

  /// max_j |h_j(x)| over effective equalities (0 when there are none).
  double residual(const Eigen::VectorXd& x) const;
};

/// Set packing: min x^T Q x + c^T x s.t. A x <= e, x binary.
struct SetPackingInstance {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  Eigen::MatrixXd A;

  int n() const { return static_cast<int>(c.size()); }
  int m() const { return static_cast<int>(A.rows()); }

  void validate() const;
  Polynomiald objective() const;
  bool feasible(const Eigen::VectorXd& x) const;

  /// The quadratic-equality form: f with h_(ijk) = A_ki A_kj x_i x_j over {0,1}^n.
  ProblemSpec as_problem() const;
};

/// min f(x) s.t. A x = b, x in [lo, hi] with x_J binary.
///
/// The bounds default to the unit box; a binary coordinate with tighter
/// bounds admits only the values of {0, 1} inside them.
struct MixedProblem {
  Objective f;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<int> J;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static MixedProblem make(Objective f, Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<int> J);

  int n() const { return f.nvars(); }
  int m() const { return static_cast<int>(A.rows()); }

  void validate() const;
  VarDomain domain() const;
  std::optional<LinearSystem> linear() const;

  /// Views a ProblemSpec without h_j as (B). Throws ModeMismatch otherwise.
  static MixedProblem from_problem(const ProblemSpec& p);
};

/// A minimization model: objective over domain, optionally with A x = b.
/// This is what reformulations produce and what solvers consume.
struct Model {
  Objective objective;
  VarDomain domain;
  std::optional<LinearSystem> linear;

  int nvars() const { return objective.nvars(); }
  ProblemSpec as_problem() const;
  static Model from_problem(const ProblemSpec& p);
};

}  // namespace lagr
