#pragma once

#include "lagr/domain.hpp"
#include "lagr/objective.hpp"
#include "lagr/problem.hpp"
#include "lagr/qubo.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace lagr {

enum class SolveMode { Exhaustive, Heuristic };

std::string to_string(SolveMode m);

struct SolveReport {
  double value = 0.0;
  /// Exhaustive mode: every minimizer within the tie tolerance.
  /// Heuristic mode: the distinct best points found.
  std::vector<Eigen::VectorXd> argmin;
  SolveMode mode = SolveMode::Exhaustive;
  bool certified = true;
  /// max over returned points of the constraint residual (0 if unconstrained).
  double residual = 0.0;
  std::vector<std::string> trace;
  std::uint64_t seed = 0;
  std::uint64_t evaluations = 0;

  const Eigen::VectorXd& best() const { return argmin.front(); }
};

/// Absolute tolerance for collecting tied minimizers.
inline constexpr double kTieTol = 1e-9;

struct BruteForceOptions {
  int grid = kDefaultGrid;
  std::uint64_t cap = kDefaultCap;
  double tie_tol = kTieTol;
  /// Points with ||A x - b||_inf above this are skipped.
  double tol_h = 1e-9;
  /// Worker threads; 0 reads LAGR_THREADS, falling back to hardware concurrency.
  unsigned threads = 0;
};

/// Global minimum and complete argmin set over the enumerated domain
/// (binary coordinates exactly, continuous ones on a grid with `grid`
/// intervals). Throws CapExceeded or Infeasible (no admissible point).
SolveReport brute_force(const Model& model, const BruteForceOptions& opts = {});
SolveReport brute_force(const Objective& f, const VarDomain& domain, const BruteForceOptions& opts = {});
SolveReport brute_force(const QuboModel& q, const BruteForceOptions& opts = {});

/// Euclidean projection onto {x in [lo, hi] : A x = b}. Exact for at most one
/// linear row; Dykstra's alternating projections otherwise.
class PolytopeProjector {
 public:
  PolytopeProjector(Eigen::VectorXd lo, Eigen::VectorXd hi, std::optional<LinearSystem> linear = {});

  Eigen::VectorXd project(const Eigen::VectorXd& v) const;
  /// Whether project(v) meets the linear rows to within tol.
  bool admissible(const Eigen::VectorXd& x, double tol = 1e-7) const;
  double linear_residual(const Eigen::VectorXd& x) const;

  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }

 private:
  Eigen::VectorXd project_affine(const Eigen::VectorXd& v) const;
  Eigen::VectorXd project_single_row(const Eigen::VectorXd& v) const;

  Eigen::VectorXd lo_, hi_;
  std::optional<LinearSystem> linear_;
  Eigen::MatrixXd pinv_;
};

struct BoxOptions {
  int starts = 64;
  std::uint64_t seed = 0;
  /// Upper bound on points in the coarse scan grid.
  int scan_budget = 4096;
  int max_iter = 2000;
  double step_tol = 1e-13;
  double armijo = 1e-4;
  double tie_tol = 1e-9;
};

/// Multi-start projected gradient descent over the relaxed domain (binary
/// coordinates treated as their intervals) intersected with A x = b.
/// Starts are the best points of a coarse grid scan, box corners and uniform
/// random points; each descent uses Barzilai-Borwein steps with Armijo
/// backtracking. Heuristic: the result is never flagged certified.
SolveReport box_minimize(const Model& model, const BoxOptions& opts = {});
SolveReport box_minimize(const Objective& f, const VarDomain& box, const BoxOptions& opts = {});

/// Projected gradient descent from one start; returns the local minimizer.
Eigen::VectorXd descend(const Objective& f, const PolytopeProjector& proj, Eigen::VectorXd x,
                        const BoxOptions& opts);

struct AnnealOptions {
  int sweeps = 1000;
  std::uint64_t seed = 0;
  /// Geometric schedule endpoints; nonpositive values pick defaults from
  /// the coefficient magnitudes.
  double t_start = 0.0;
  double t_end = 0.0;
  bool record_trace = false;
};

/// Single-flip Metropolis annealing; deterministic for a given seed.
SolveReport anneal_qubo(const QuboModel& q, const AnnealOptions& opts = {});

struct EscalationSchedule {
  double y0 = 1.0;
  double growth = 2.0;
  int max_steps = 40;
  double value_tol = 1e-8;
  double residual_tol = 1e-6;

  double y(int step) const;
};

enum class InnerSolver { BruteForce, Box };

struct EscalationStep {
  int step = 0;
  double y = 0.0;
  SolveReport report;
  double residual = 0.0;
  /// ((P)*_ub + M) / y with M = max |f| over sampled X.
  double residual_bound = 0.0;
  bool monotone = true;
  bool below_feasible_value = true;
  bool residual_within_bound = true;
};

struct EscalationResult {
  std::vector<EscalationStep> steps;
  bool converged = false;
  /// Upper bound on (P)* from a sampled feasible point (inf when none found).
  double p_star_ub = 0.0;
  double f_abs_max = 0.0;

  const EscalationStep& last() const { return steps.back(); }
  bool all_checks_pass() const;
};

struct EscalationOptions {
  InnerSolver inner = InnerSolver::Box;
  BruteForceOptions brute{};
  BoxOptions box{};
  /// Slack allowed in the per-step monotonicity and weak-duality checks
  /// (nonzero for heuristic inner solves).
  double check_tol = 1e-9;
};

/// Solves D_y along y_l = y0 * g^l until the value change and residual both
/// drop below tolerance. Throws Diverged when a value exceeds the interval
/// upper bound on f over X, which weak duality forbids for feasible problems.
EscalationResult escalate(const ProblemSpec& problem, const EscalationSchedule& schedule,
                          const EscalationOptions& opts = {});

/// CSV trace: step,y,value,residual,point (point coordinates joined by ';').
void write_escalation_csv(std::ostream& os, const EscalationResult& r);

/// Nearest integer on J with ties to even; other coordinates unchanged.
Eigen::VectorXd nint(const Eigen::VectorXd& x, const std::vector<int>& J);

/// Fixes x_J := nint(x_relaxed_J) and minimizes the remaining continuous
/// problem min f(x_Jc) s.t. A_Jc x_Jc = b - A_J x_J, x_Jc in its box.
/// Throws Infeasible when the reduced polytope is empty.
SolveReport round_and_reduce(const MixedProblem& mp, const Eigen::VectorXd& x_relaxed,
                             const BoxOptions& opts = {});

/// Threads to use for data-parallel loops (LAGR_THREADS caps it).
unsigned worker_threads(unsigned requested = 0);

}  // namespace lagr
