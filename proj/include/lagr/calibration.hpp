#pragma once

#include "lagr/domain.hpp"
#include "lagr/objective.hpp"
#include "lagr/polynomial.hpp"
#include "lagr/problem.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace lagr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerances and enumeration limits shared by the calibration routines.
struct CalibrationOptions {
  /// |h_j(x)| <= tol_h counts as h_j(x) = 0.
  double tol_h = 1e-9;
  int grid = kDefaultGrid;
  std::uint64_t cap = kDefaultCap;
};

/// h(x) = sum_j h_j(x) over the effective equalities.
Polynomiald h_sum(const ProblemSpec& problem);

/// Points of X (binary coordinates enumerated, continuous ones gridded)
/// split by membership in H.
struct DomainSample {
  std::vector<Eigen::VectorXd> feasible;
  std::vector<Eigen::VectorXd> infeasible;
  /// True when continuous coordinates were gridded.
  bool gridded = false;
};

DomainSample sample_domain(const ProblemSpec& problem, const CalibrationOptions& opts = {});

/// min h over { x in X : d(x, H) >= eps }, or +inf when that set is empty.
/// Distances are measured to the enumerated points of X intersected with H.
double h_eps(const ProblemSpec& problem, double eps, const CalibrationOptions& opts = {});

/// min f over { x in X : d(x, H) <= eps }. Throws Infeasible when empty.
double f_eps(const ProblemSpec& problem, double eps, const CalibrationOptions& opts = {});

/// Exact min of h over X \ H for finite X (+inf when X \ H is empty).
/// Throws NotClosed for continuous X.
double tilde_h(const ProblemSpec& problem, const CalibrationOptions& opts = {});

enum class BoundMethod { Exhaustive, FeasiblePoint, CoefficientBound, UserSupplied };

std::string to_string(BoundMethod m);

struct PenaltyCertificate {
  double tilde_h_lb = 0.0;
  double p_star_ub = 0.0;
  double d0_star_lb = 0.0;
  /// (p_star_ub - d0_star_lb) / tilde_h_lb, clamped at 0.
  double y_valid = 0.0;
  /// y_valid + delta; the multiplier under which optimizer sets coincide.
  double y_strict = 0.0;
  bool strict = true;
  BoundMethod tilde_h_method = BoundMethod::Exhaustive;
  BoundMethod p_star_method = BoundMethod::Exhaustive;
  BoundMethod d0_star_method = BoundMethod::Exhaustive;
  /// Continuous coordinates were gridded when computing p_star_ub.
  bool gridded = false;
  /// A point attaining p_star_ub.
  Eigen::VectorXd witness;
};

/// Optional externally supplied bounds; each replaces the computed one.
struct BoundOverrides {
  std::optional<double> tilde_h_lb;
  std::optional<double> p_star_ub;
  std::optional<double> d0_star_lb;
  std::optional<Eigen::VectorXd> feasible_point;
};

/// Relative margin used for the strict multiplier.
inline constexpr double kStrictMargin = 1e-6;

double strict_margin(double y);

/// Certified multiplier for the Lagrangian reformulation.
///
/// Finite X is enumerated exactly. A mixed X is accepted when every h_j
/// depends only on binary coordinates (X \ H is then a finite union of
/// boxes, hence closed); p_star_ub then comes from gridded feasible points
/// and d0_star_lb from an interval bound. Past the enumeration cap, integer
/// h_j over binary X fall back to tilde_h >= 1, a coefficient bound for
/// (D0)*, and the origin (or a supplied point) as the feasible point.
///
/// Throws NonnegativityViolated, Infeasible, NotClosed or CapExceeded.
PenaltyCertificate calibrate(const ProblemSpec& problem, const BoundOverrides& overrides = {},
                             const CalibrationOptions& opts = {});

/// Lower bound on min f over the domain from the interval extension of the
/// binary-reduced objective.
double coefficient_lower_bound(const Objective& f, const VarDomain& domain);
/// Upper bound on max f over the domain, same construction.
double coefficient_upper_bound(const Objective& f, const VarDomain& domain);

enum class SmoothnessMethod { HessianCoefficientBound, UserSupplied };

struct SmoothnessBound {
  double L_hat = 0.0;
  SmoothnessMethod method = SmoothnessMethod::HessianCoefficientBound;
};

/// L_hat = max_i sum_j sup_box |d^2 f / dx_i dx_j|, with each sup taken from
/// the interval extension of the second partial. Root terms contribute
/// |c| / (4 lo^{3/2}) on their diagonal, which is +inf when lo = 0.
SmoothnessBound smoothness_bound(const Objective& f, const std::vector<Interval>& box);

/// Bounds for the set-packing QUBO penalties: r1_lb <= min f over {0,1}^n,
/// r2_ub >= z_SP, rho_ub >= max(|r1_lb|, |r2_ub|).
struct SetPackingBounds {
  double r1_lb = 0.0;
  double r2_ub = 0.0;
  double rho_ub = 0.0;
  BoundMethod r1_method = BoundMethod::Exhaustive;
  BoundMethod r2_method = BoundMethod::Exhaustive;
};

struct SetPackingInstance;
SetPackingBounds set_packing_bounds(const SetPackingInstance& sp, const CalibrationOptions& opts = {});

/// Output of the heuristic boundedness probe for ((P)* - f) / h on X \ H.
struct RatioProbe {
  double empirical_sup = -kInf;
  /// Running maximum of the ratio per shell at distance 2^-k from H.
  std::vector<double> shell_max;
  std::vector<double> shell_distance;
  bool diverging = false;
  std::uint64_t samples = 0;
};

struct ProbeOptions {
  int shells = 30;
  int random_samples = 2000;
  unsigned seed = 1;
  double tol_h = 1e-12;
};

/// Samples points approaching the feasible references along coordinate
/// directions plus uniform points in the box. Diagnostic only.
RatioProbe ratio_boundedness_probe(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const std::function<double(const Eigen::VectorXd&)>& h,
                                   double p_star, const VarDomain& box,
                                   const std::vector<Eigen::VectorXd>& feasible_refs,
                                   const ProbeOptions& opts = {});

RatioProbe ratio_boundedness_probe(const ProblemSpec& problem, double p_star,
                                   const std::vector<Eigen::VectorXd>& feasible_refs,
                                   const ProbeOptions& opts = {});

}  // namespace lagr
