#include "lagr/reformulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace lagr {

std::string to_string(ReformulationKind k) {
  switch (k) {
    case ReformulationKind::Lagrangian: return "lagrangian";
    case ReformulationKind::SlackQubo: return "slack";
    case ReformulationKind::QuadraticQubo: return "quadratic";
    case ReformulationKind::RelaxLinear: return "b1";
    case ReformulationKind::RelaxBinary: return "b2";
    case ReformulationKind::RelaxBoth: return "b3";
  }
  return "unknown";
}

Objective lagrangian(const ProblemSpec& problem, const Eigen::VectorXd& y) {
  const auto hs = problem.effective_equalities();
  if (static_cast<std::size_t>(y.size()) != hs.size())
    throw std::invalid_argument("lagrangian: expected " + std::to_string(hs.size()) + " multipliers, got " +
                                std::to_string(y.size()));
  Objective L = problem.objective;
  for (std::size_t j = 0; j < hs.size(); ++j) {
    if (!std::isfinite(y(static_cast<Eigen::Index>(j)))) throw std::invalid_argument("lagrangian: y must be finite");
    L += hs[j] * y(static_cast<Eigen::Index>(j));
  }
  return L.reduce_binary(problem.domain.binary_indices());
}

Objective lagrangian(const ProblemSpec& problem, double y) {
  const auto m = static_cast<Eigen::Index>(problem.effective_equalities().size());
  return lagrangian(problem, Eigen::VectorXd::Constant(m, y));
}

Model lagrangian_model(const ProblemSpec& problem, double y) {
  return Model{lagrangian(problem, y), problem.domain, std::nullopt};
}

QuboModel slack_qubo(const SetPackingInstance& sp, double rho_ub) {
  sp.validate();
  const int n = sp.n(), m = sp.m(), N = n + m;
  std::vector<int> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) xs[static_cast<std::size_t>(i)] = i;
  Polynomiald p = sp.objective().embed(N, xs);
  const double penalty = 2.0 * (rho_ub + 1.0);
  for (int k = 0; k < m; ++k) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(N);
    a.head(n) = sp.A.row(k).transpose();
    a(n + k) = 1.0;
    p += Polynomiald::affine(a, -1.0).squared() * penalty;
  }
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  for (int k = 0; k < m; ++k) names.push_back("s" + std::to_string(k));
  return QuboModel::from_polynomial(p, std::move(names));
}

double quadratic_qubo_penalty(double r1_lb, double r2_ub) { return r2_ub - r1_lb + 1.0; }

QuboModel quadratic_qubo(const SetPackingInstance& sp, double r1_lb, double r2_ub) {
  sp.validate();
  const int n = sp.n();
  const double penalty = quadratic_qubo_penalty(r1_lb, r2_ub);
  Polynomiald p = sp.objective();
  for (int k = 0; k < sp.m(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double w = sp.A(k, i) * sp.A(k, j);
        if (w != 0.0) p += Polynomiald::variable(n, i) * Polynomiald::variable(n, j) * (penalty * w);
      }
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("x" + std::to_string(i));
  return QuboModel::from_polynomial(p, std::move(names));
}

namespace {

Polynomiald binary_penalty(const MixedProblem& mp) {
  const int n = mp.n();
  Polynomiald p(n);
  for (int i : mp.J) {
    const Polynomiald xi = Polynomiald::variable(n, i);
    p += xi - xi * xi;
  }
  return p;
}

void check_nonneg_weight(double w, const char* name) {
  if (!(w >= 0.0) || !std::isfinite(w)) throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
}

}  // namespace

Model relax_linear(const MixedProblem& mp, double y) {
  mp.validate();
  check_nonneg_weight(y, "y");
  return Model{mp.f + squared_residual(mp.A, mp.b) * y, mp.domain(), std::nullopt};
}

Model relax_binary(const MixedProblem& mp, double z) {
  mp.validate();
  check_nonneg_weight(z, "z");
  return Model{mp.f + binary_penalty(mp) * z, mp.domain().relaxed(), mp.linear()};
}

Model relax_both(const MixedProblem& mp, double y, double z) {
  mp.validate();
  check_nonneg_weight(y, "y");
  check_nonneg_weight(z, "z");
  return Model{mp.f + squared_residual(mp.A, mp.b) * y + binary_penalty(mp) * z, mp.domain().relaxed(),
               std::nullopt};
}

Model exact_model(const MixedProblem& mp) {
  mp.validate();
  return Model{mp.f, mp.domain(), mp.linear()};
}

ReformulationReport report_for(ReformulationKind kind, const Model& m, std::vector<double> penalties) {
  ReformulationReport r;
  r.kind = kind;
  r.variables = m.nvars();
  r.penalties = std::move(penalties);
  return r;
}

ReformulationReport qubo_pair_report(const SetPackingInstance& sp, double slack_penalty, double quadratic_penalty) {
  ReformulationReport r;
  r.kind = ReformulationKind::SlackQubo;
  r.variables = sp.n() + sp.m();
  r.slack_variables = sp.n() + sp.m();
  r.quadratic_variables = sp.n();
  r.penalties = {slack_penalty, quadratic_penalty};
  return r;
}

}  // namespace lagr
