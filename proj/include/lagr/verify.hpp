#pragma once

#include "lagr/calibration.hpp"
#include "lagr/problem.hpp"
#include "lagr/solvers.hpp"

#include <nlohmann/json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace lagr {

struct CheckOutcome {
  std::string instance;
  bool pass = true;
  /// Expected failure: the instance is documented to violate the claim.
  bool xfail = false;
  std::string detail;
  /// For failures: the instance and point that reproduce the failure.
  nlohmann::json witness;
};

struct VerificationReport {
  std::string claim;
  std::vector<CheckOutcome> outcomes;
  double tolerance = 0.0;

  int instances() const { return static_cast<int>(outcomes.size()); }
  /// True iff every outcome not marked xfail passes.
  bool passed() const;
  int failures() const;
  void append(const VerificationReport& other);
};

nlohmann::json to_json(const VerificationReport& r);
/// One row per outcome: claim, instance, PASS/FAIL/XFAIL, detail.
void print_table(std::ostream& os, const std::vector<VerificationReport>& reports);

struct VerifyOptions {
  BruteForceOptions brute{};
  CalibrationOptions calib{};
  std::uint64_t seed = 2024;
};

/// (D_y)* <= (P)* for each y on the grid, both by brute force.
VerificationReport check_weak_duality(const ProblemSpec& problem, const std::vector<double>& y_grid,
                                      const std::string& name, const VerifyOptions& opts = {});

/// (D_y)* nondecreasing along the sorted grid.
VerificationReport check_monotonicity(const ProblemSpec& problem, const std::vector<double>& y_grid,
                                      const std::string& name, const VerifyOptions& opts = {});

/// Value equality at cert.y_valid, argmin-set equality at cert.y_strict.
/// Also records whether y_valid itself admits extra infeasible minimizers.
VerificationReport check_reformulation(const ProblemSpec& problem, const PenaltyCertificate& cert,
                                       const std::string& name, const VerifyOptions& opts = {});

/// For pure-binary (B): finds y', z' by doubling from the given starts and
/// checks that (B), (B1_y), (B2_z), (B3_yz) share value and optimizer set
/// at y', z' and at their doubles. (B2_z) and (B3_yz) are solved over the
/// extreme points of their feasible polytopes and cross-checked on sampled
/// interior points.
VerificationReport check_pure_binary_equivalences(const MixedProblem& mp, double y_start, double z_start,
                                                  const std::string& name, const VerifyOptions& opts = {});

struct RoundingOutcome {
  /// Smallest z of the schedule from which rounding matched for every later z.
  double threshold = 0.0;
  bool found = false;
  double oracle_value = 0.0;
  double reduced_value = 0.0;
};

/// For each z of the schedule solves (B2_z), rounds x_J and compares with the
/// oracle-optimal binary patterns; at the final z also runs round_and_reduce.
VerificationReport check_rounding(const MixedProblem& mp, const std::vector<double>& z_schedule,
                                  const std::string& name, RoundingOutcome* outcome = nullptr,
                                  const VerifyOptions& opts = {});

/// Exact optimum of (B) for quadratic f with at most 3 continuous variables:
/// enumerates binary patterns and, for each, every face of the continuous box
/// via its KKT system. Independent of the descent solvers.
struct MixedOracle {
  double value = 0.0;
  std::vector<Eigen::VectorXd> argmin;
  /// Binary parts of the optimal points.
  std::vector<Eigen::VectorXd> patterns;
};
MixedOracle solve_mixed_exact(const MixedProblem& mp, double tie_tol = 1e-7);

/// Vertices of {x in [lo, hi] : A x = b} by basis enumeration.
std::vector<Eigen::VectorXd> polytope_vertices(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                               const std::optional<LinearSystem>& linear, double tol = 1e-9);

struct StationaryPoint {
  double z = 0.0;
  double x = 0.0;
  /// +1 local min, -1 local max.
  int kind = 0;
};

/// Roots of the example-7 derivative on (0,1) found by sign changes on a
/// uniform grid of `grid` cells, refined by bisection.
std::vector<StationaryPoint> example7_stationary(double z, int grid = 100000);

/// CSV: z,global_min,local_max,local_min (blank when a branch is absent).
void write_example7_branches(std::ostream& os, const std::vector<double>& z_values, int grid = 100000);

/// Replays every worked example; the x^2 variant of example 4 is an xfail.
VerificationReport run_worked_examples(const VerifyOptions& opts = {});

/// Suites for the CLI: weak | reform | pure | rounding | examples | all.
std::vector<VerificationReport> run_suite(const std::string& suite, const VerifyOptions& opts = {});

/// Re-evaluates a serialized weak-duality or reformulation witness; true iff
/// the recorded failure still occurs.
bool replay_witness(const nlohmann::json& witness);

}  // namespace lagr
