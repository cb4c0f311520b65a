#include "lagr/catalog.hpp"

#include <cmath>

namespace lagr::catalog {

namespace {

using P = Polynomiald;

int uniform_int(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool coin(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

/// Degree <= 2 polynomial with integer coefficients in [-5, 5].
P random_quadratic(std::mt19937_64& rng, int n, double density) {
  P f = P::constant(n, uniform_int(rng, -5, 5));
  for (int i = 0; i < n; ++i) {
    if (coin(rng, density)) f += P::variable(n, i) * static_cast<double>(uniform_int(rng, -5, 5));
    for (int j = i; j < n; ++j)
      if (coin(rng, density / 2.0))
        f += P::variable(n, i) * P::variable(n, j) * static_cast<double>(uniform_int(rng, -5, 5));
  }
  return f;
}

Eigen::VectorXd random_binary_point(std::mt19937_64& rng, int n) {
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = coin(rng, 0.5) ? 1.0 : 0.0;
  return x;
}

}  // namespace

ProblemSpec example1() {
  ProblemSpec p;
  const P x1 = P::variable(2, 0), x2 = P::variable(2, 1);
  p.objective = (x1 - P::constant(2, 1.0)).squared() + x2 * x2;
  p.equalities = {x1 * (P::constant(2, 2.0) - x1)};
  p.domain = VarDomain({VarBounds::binary(), VarBounds::unit()});
  p.names = {"x1", "x2"};
  return p;
}

ProblemSpec example2() {
  ProblemSpec p;
  const P x = P::variable(1, 0);
  p.objective = x;
  p.equalities = {x * x};
  p.domain = VarDomain::unit_box(1);
  return p;
}

ProblemSpec example3() {
  ProblemSpec p = example2();
  p.domain = VarDomain({VarBounds::box(-1.0, 1.0)});
  return p;
}

double example3_dual_value(double y) { return y < 0.5 ? y - 1.0 : -1.0 / (4.0 * y); }

MixedProblem example5() {
  const P x = P::variable(1, 0);
  return MixedProblem::make(x * (x - P::constant(1, 0.5)) * (x - P::constant(1, 1.0)), Eigen::MatrixXd(0, 1),
                            Eigen::VectorXd(0), {0});
}

MixedProblem example6() {
  const P x = P::variable(1, 0);
  MixedProblem mp = MixedProblem::make(x * (x + P::constant(1, 1.0)), Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), {0});
  mp.lo(0) = 0.5;
  mp.validate();
  return mp;
}

namespace {

Objective example7_objective() {
  const P x = P::variable(1, 0);
  return Objective(x * (x * x * 4.0 - x * 2.0 - P::constant(1, 1.0)) * 2.0, {RootTerm{0, -1.0}});
}

}  // namespace

MixedProblem example7() {
  return MixedProblem::make(example7_objective(), Eigen::MatrixXd(0, 1), Eigen::VectorXd(0), {0});
}

ProblemSpec example7_problem() {
  ProblemSpec p;
  const P x = P::variable(1, 0);
  p.objective = example7_objective();
  p.equalities = {x * (P::constant(1, 1.0) - x)};
  p.domain = VarDomain::unit_box(1);
  return p;
}

double example7_slope(double x, double z) {
  return -0.5 / std::sqrt(x) + 24.0 * x * x - 8.0 * x - 2.0 + z * (1.0 - 2.0 * x);
}

SetPackingInstance path3() {
  SetPackingInstance sp;
  sp.Q = Eigen::MatrixXd::Zero(3, 3);
  sp.c = -Eigen::VectorXd::Ones(3);
  sp.A.resize(2, 3);
  sp.A << 1, 1, 0, 0, 1, 1;
  return sp;
}

ProblemSpec random_binary_problem(std::mt19937_64& rng, int n, int m) {
  ProblemSpec p;
  p.objective = random_quadratic(rng, n, 0.6);
  p.domain = VarDomain::all_binary(n);
  const Eigen::VectorXd xbar = random_binary_point(rng, n);
  for (int k = 0; k < m; ++k) {
    // Either a product that vanishes at xbar or a squared linear residual.
    std::vector<std::pair<int, int>> zero_pairs;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (xbar(i) * xbar(j) == 0.0) zero_pairs.emplace_back(i, j);
    if (!zero_pairs.empty() && coin(rng, 1.0 / 3.0)) {
      const auto [i, j] = zero_pairs[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(zero_pairs.size()) - 1))];
      p.equalities.push_back(P::variable(n, i) * P::variable(n, j));
    } else {
      Eigen::VectorXd a(n);
      for (int i = 0; i < n; ++i) a(i) = uniform_int(rng, -5, 5);
      if (a.isZero()) a(uniform_int(rng, 0, n - 1)) = 1.0;
      p.equalities.push_back(P::affine(a, -a.dot(xbar)).squared());
    }
  }
  return p;
}

SetPackingInstance random_set_packing(std::mt19937_64& rng, int n, int m) {
  SetPackingInstance sp;
  sp.Q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (coin(rng, 0.3)) sp.Q(i, j) = sp.Q(j, i) = uniform_int(rng, -5, 5);
  sp.c.resize(n);
  for (int i = 0; i < n; ++i) sp.c(i) = uniform_int(rng, -5, 5);
  sp.A = Eigen::MatrixXd::Zero(m, n);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) sp.A(k, i) = coin(rng, 0.4) ? 1.0 : 0.0;
    while (sp.A.row(k).sum() < 2.0 && n >= 2) sp.A(k, uniform_int(rng, 0, n - 1)) = 1.0;
  }
  return sp;
}

MixedProblem random_pure_binary(std::mt19937_64& rng, int n, int m) {
  const Eigen::VectorXd xbar = random_binary_point(rng, n);
  Eigen::MatrixXd A(m, n);
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < n; ++i) A(k, i) = uniform_int(rng, -3, 3);
  Eigen::VectorXd b = A * xbar;
  std::vector<int> J(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) J[static_cast<std::size_t>(i)] = i;
  return MixedProblem::make(random_quadratic(rng, n, 0.6), std::move(A), std::move(b), std::move(J));
}

MixedProblem random_mixed(std::mt19937_64& rng, int binary, int continuous, int m) {
  const int n = binary + continuous;
  Eigen::VectorXd xbar(n);
  xbar.head(binary) = random_binary_point(rng, binary);
  for (int i = binary; i < n; ++i) xbar(i) = 0.25 * uniform_int(rng, 1, 3);
  Eigen::MatrixXd A(m, n);
  for (int k = 0; k < m; ++k) {
    for (int i = 0; i < n; ++i) A(k, i) = uniform_int(rng, -3, 3);
    // A nonzero continuous coefficient keeps most roundings feasible.
    if (continuous > 0 && A.row(k).tail(continuous).isZero()) A(k, n - 1) = 1.0;
  }
  Eigen::VectorXd b = A * xbar;
  std::vector<int> J(static_cast<std::size_t>(binary));
  for (int i = 0; i < binary; ++i) J[static_cast<std::size_t>(i)] = i;
  return MixedProblem::make(random_quadratic(rng, n, 0.6), std::move(A), std::move(b), std::move(J));
}

std::vector<NamedProblem> corpus() {
  std::vector<NamedProblem> out;
  out.push_back({"example1", example1()});
  out.push_back({"example2", example2()});
  out.push_back({"example3", example3()});
  out.push_back({"example7", example7_problem()});
  out.push_back({"path3", path3().as_problem()});
  std::mt19937_64 rng(7);
  for (int k = 0; k < 8; ++k) {
    const int n = 3 + k % 6;
    const int m = 1 + k % 3;
    out.push_back({"random" + std::to_string(k), random_binary_problem(rng, n, m)});
  }
  return out;
}

}  // namespace lagr::catalog
