#pragma once

#include "lagr/polynomial.hpp"

#include <Eigen/Dense>

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lagr {

/// x^T Q x + c^T x + offset over {0,1}^n with Q strictly upper triangular.
struct QuboModel {
  int n = 0;
  std::map<std::pair<int, int>, double> quadratic;
  std::map<int, double> linear;
  double offset = 0.0;
  std::vector<std::string> names;

  /// Builds from a polynomial of degree <= 2 after binary reduction of every
  /// variable. Throws ModeMismatch for higher degree.
  static QuboModel from_polynomial(const Polynomiald& p, std::vector<std::string> names = {});

  Polynomiald to_polynomial() const;

  double evaluate(const Eigen::VectorXd& x) const;

  /// Energy change when bit i of x is flipped.
  double flip_delta(const Eigen::VectorXd& x, int i) const;

  /// Adjacency view: neighbours[i] lists (j, coupling) for all couplers on i.
  std::vector<std::vector<std::pair<int, double>>> neighbours() const;

  void add_linear(int i, double v);
  void add_quadratic(int i, int j, double v);
};

/// Writes the plain-text `.qubo` form:
///   c offset <value>
///   p qubo 0 <maxNodes> <nNodes> <nCouplers>
///   i i <value>   (one line per nonzero linear term, ascending i)
///   i j <value>   (one line per coupler, i < j, ascending)
/// Values are printed with 17 significant digits.
void write_qubo_text(std::ostream& os, const QuboModel& q);
QuboModel read_qubo_text(std::istream& is);

}  // namespace lagr
