#pragma once
// Reference computations for the tests. Each one enumerates directly and
// evaluates terms itself, so it shares no code with the solvers it checks.

#include "lagr/problem.hpp"
#include "lagr/qubo.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle {

inline double eval_terms(const lagr::Polynomiald& p, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double m = c;
    for (std::size_t i = 0; i < e.size(); ++i) m *= std::pow(x(static_cast<Eigen::Index>(i)), e[i]);
    s += m;
  }
  return s;
}

inline Eigen::VectorXd bits(std::uint64_t mask, int n) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = static_cast<double>((mask >> i) & 1U);
  return x;
}

struct Enumerated {
  double p_star = std::numeric_limits<double>::infinity();
  double d0_star = std::numeric_limits<double>::infinity();
  /// min sum_j h_j over infeasible points (+inf when none).
  double tilde_h = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> argmin;
};

/// Exhaustive (P)*, (D0)*, tilde h and argmin for a problem over {0,1}^n.
inline Enumerated enumerate_binary(const lagr::ProblemSpec& p, double tie = 1e-9) {
  const int n = p.nvars();
  const auto hs = p.effective_equalities();
  Enumerated r;
  std::vector<std::pair<double, Eigen::VectorXd>> feas;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    const Eigen::VectorXd x = bits(m, n);
    double f = eval_terms(p.objective.poly, x);
    r.d0_star = std::min(r.d0_star, f);
    double h = 0.0;
    for (const auto& hj : hs) h += eval_terms(hj, x);
    if (std::abs(h) <= 1e-9) {
      r.p_star = std::min(r.p_star, f);
      feas.emplace_back(f, x);
    } else {
      r.tilde_h = std::min(r.tilde_h, h);
    }
  }
  for (const auto& [f, x] : feas)
    if (f <= r.p_star + tie) r.argmin.push_back(x);
  return r;
}

/// min and argmin of f + y * sum_j h_j over {0,1}^n.
inline std::pair<double, std::vector<Eigen::VectorXd>> dual_binary(const lagr::ProblemSpec& p, double y,
                                                                   double tie = 1e-9) {
  const int n = p.nvars();
  const auto hs = p.effective_equalities();
  std::vector<double> vals;
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    const Eigen::VectorXd x = bits(m, n);
    double v = eval_terms(p.objective.poly, x);
    for (const auto& hj : hs) v += y * eval_terms(hj, x);
    vals.push_back(v);
    best = std::min(best, v);
  }
  std::vector<Eigen::VectorXd> arg;
  for (std::uint64_t m = 0; m < vals.size(); ++m)
    if (vals[m] <= best + tie) arg.push_back(bits(m, n));
  return {best, arg};
}

/// z_SP with integer arithmetic (Q, c, A must be integral).
inline long long set_packing_optimum(const lagr::SetPackingInstance& sp) {
  const int n = sp.n();
  long long best = std::numeric_limits<long long>::max();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    bool ok = true;
    for (int k = 0; k < sp.m() && ok; ++k) {
      long long row = 0;
      for (int i = 0; i < n; ++i)
        if ((m >> i) & 1U) row += std::llround(sp.A(k, i));
      ok = row <= 1;
    }
    if (!ok) continue;
    long long v = 0;
    for (int i = 0; i < n; ++i) {
      if (!((m >> i) & 1U)) continue;
      v += std::llround(sp.c(i));
      for (int j = 0; j < n; ++j)
        if ((m >> j) & 1U) v += std::llround(sp.Q(i, j));
    }
    best = std::min(best, v);
  }
  return best;
}

/// Exhaustive QUBO minimum with integer arithmetic (integral coefficients).
inline long long qubo_optimum(const lagr::QuboModel& q) {
  long long best = std::numeric_limits<long long>::max();
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << q.n); ++m) {
    long long v = std::llround(q.offset);
    for (const auto& [i, c] : q.linear)
      if ((m >> i) & 1U) v += std::llround(c);
    for (const auto& [ij, c] : q.quadratic)
      if (((m >> ij.first) & 1U) && ((m >> ij.second) & 1U)) v += std::llround(c);
    best = std::min(best, v);
  }
  return best;
}

inline bool same_points(const std::vector<Eigen::VectorXd>& a, const std::vector<Eigen::VectorXd>& b,
                        double tol = 1e-9) {
  if (a.size() != b.size()) return false;
  for (const auto& x : a) {
    bool found = false;
    for (const auto& y : b) found = found || (x - y).cwiseAbs().maxCoeff() <= tol;
    if (!found) return false;
  }
  return true;
}

/// min over [-1, 1] of x + y x^2 by case analysis on the vertex -1/(2y).
inline double example3_closed_form(double y) {
  if (y <= 0.0) return -1.0 + y;
  const double v = -1.0 / (2.0 * y);
  return v <= -1.0 ? -1.0 + y : v + y * v * v;
}

/// Stationary points of -sqrt(x) + 2x(4x^2-2x-1) + z x(1-x), from a 40-digit
/// root solve.
struct Example7Reference {
  double z;
  std::vector<double> roots;
  double global_min_value;
};

inline const std::vector<Example7Reference>& example7_reference() {
  static const std::vector<Example7Reference> r{
      {10.0, {0.0040180866935127496, 0.38167430140668007, 0.75899693938309562}, -0.031469197563395342},
      {100.0, {2.6033697397361011e-5, 0.49614406318215073}, -0.0025510908865863008},
      {1000.0, {2.5100326154562604e-7, 0.49964346977303368}, -0.00025050106525859185},
  };
  return r;
}

}  // namespace oracle
