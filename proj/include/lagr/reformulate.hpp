#pragma once

#include "lagr/objective.hpp"
#include "lagr/problem.hpp"
#include "lagr/qubo.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace lagr {

enum class ReformulationKind { Lagrangian, SlackQubo, QuadraticQubo, RelaxLinear, RelaxBinary, RelaxBoth };

std::string to_string(ReformulationKind k);

struct ReformulationReport {
  ReformulationKind kind = ReformulationKind::Lagrangian;
  int variables = 0;
  std::vector<double> penalties;
  /// Filled for the QUBO pair: slack form uses n + m, quadratic form n.
  int slack_variables = 0;
  int quadratic_variables = 0;
};

/// f + sum_j y_j h_j, binary-reduced over the binary coordinates of X.
/// y has one entry per effective equality (h_j then one per linear row).
Objective lagrangian(const ProblemSpec& problem, const Eigen::VectorXd& y);
/// Same multiplier for every effective equality.
Objective lagrangian(const ProblemSpec& problem, double y);

/// The Lagrangian relaxation as a model over X.
Model lagrangian_model(const ProblemSpec& problem, double y);

/// x^T Q x + c^T x + 2 (rho_ub + 1) ||A x + s - e||^2 over (x, s) in {0,1}^{n+m}.
QuboModel slack_qubo(const SetPackingInstance& sp, double rho_ub);

/// x^T Q x + c^T x + (r2_ub - r1_lb + 1) sum_k sum_{i<j} A_ki A_kj x_i x_j
/// over {0,1}^n. Repeated pairs across rows are summed.
QuboModel quadratic_qubo(const SetPackingInstance& sp, double r1_lb, double r2_ub);

/// Penalty weight used by quadratic_qubo.
double quadratic_qubo_penalty(double r1_lb, double r2_ub);

/// (B1_y): f + y ||A x - b||^2 over [lo, hi] with x_J binary.
Model relax_linear(const MixedProblem& mp, double y);
/// (B2_z): f + z sum_{i in J} x_i (1 - x_i) over the polytope {x in [lo, hi] : A x = b}.
Model relax_binary(const MixedProblem& mp, double z);
/// (B3_yz): f + y ||A x - b||^2 + z sum_{i in J} x_i (1 - x_i) over [lo, hi].
Model relax_both(const MixedProblem& mp, double y, double z);

/// The model of (B) itself.
Model exact_model(const MixedProblem& mp);

ReformulationReport report_for(ReformulationKind kind, const Model& m, std::vector<double> penalties);
ReformulationReport qubo_pair_report(const SetPackingInstance& sp, double slack_penalty,
                                     double quadratic_penalty);

}  // namespace lagr
