#include "oracles.hpp"

#include "lagr/calibration.hpp"
#include "lagr/catalog.hpp"
#include "lagr/errors.hpp"
#include "lagr/reformulate.hpp"
#include "lagr/solvers.hpp"

#include <doctest.h>

#include <random>

using namespace lagr;
using P = Polynomiald;

namespace {

SetPackingInstance single_edge(const Eigen::MatrixXd& Q, const Eigen::VectorXd& c) {
  SetPackingInstance sp;
  sp.Q = Q;
  sp.c = c;
  sp.A = Eigen::MatrixXd::Ones(1, 2);
  return sp;
}

}  // namespace

TEST_CASE("lagrangian of Example 1 at y = 1 is 1 + x2^2 on X") {
  const ProblemSpec p = catalog::example1();
  const Objective L = lagrangian(p, 1.0);
  const P x2 = P::variable(2, 1);
  CHECK(L.poly == P::constant(2, 1.0) + x2 * x2);
  CHECK(lagrangian(p, 0.0).poly == p.objective.poly.reduce_binary({0}));
  CHECK_THROWS_AS(lagrangian(p, Eigen::VectorXd::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(lagrangian(p, kInf), std::invalid_argument);
}

TEST_CASE("lagrangian of Example 2") {
  const P x = P::variable(1, 0);
  CHECK(lagrangian(catalog::example2(), 2.0).poly == x + x * x * 2.0);
}

TEST_CASE("lagrangian equals f at feasible points") {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 30; ++k) {
    const ProblemSpec p = catalog::random_binary_problem(rng, 2 + k % 6, 1 + k % 3);
    const Objective L = lagrangian(p, 3.5);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << p.nvars()); ++m) {
      const Eigen::VectorXd x = oracle::bits(m, p.nvars());
      if (p.residual(x) == 0.0) CHECK(L.value(x) == p.objective.value(x));
    }
  }
}

TEST_CASE("slack QUBO on one edge") {
  const SetPackingInstance sp = single_edge(Eigen::MatrixXd::Zero(2, 2), Eigen::Vector2d(-1, -1));
  const SetPackingBounds b = set_packing_bounds(sp);
  const QuboModel q = slack_qubo(sp, b.rho_ub);
  CHECK(q.n == 3);
  CHECK(q.names == std::vector<std::string>{"x0", "x1", "s0"});
  CHECK(oracle::qubo_optimum(q) == -1);
  // The penalty polynomial is 2(rho+1)(x1 + x2 + s - 1)^2.
  const P pen = P::affine(Eigen::Vector3d(1, 1, 1), -1.0).squared() * (2.0 * (b.rho_ub + 1.0));
  const P f = sp.objective().embed(3, {0, 1});
  for (std::uint64_t m = 0; m < 8; ++m) CHECK(q.evaluate(oracle::bits(m, 3)) == (f + pen)(oracle::bits(m, 3)));
}

TEST_CASE("QUBO pair on P3 and on an empty constraint matrix") {
  const SetPackingInstance p3 = catalog::path3();
  const SetPackingBounds b = set_packing_bounds(p3);
  const QuboModel s = slack_qubo(p3, b.rho_ub);
  const QuboModel q = quadratic_qubo(p3, b.r1_lb, b.r2_ub);
  CHECK(s.n == 5);
  CHECK(q.n == 3);
  CHECK(oracle::qubo_optimum(s) == -2);
  CHECK(oracle::qubo_optimum(q) == -2);
  const ReformulationReport r = qubo_pair_report(p3, 2.0 * (b.rho_ub + 1.0), quadratic_qubo_penalty(b.r1_lb, b.r2_ub));
  CHECK(r.slack_variables == 5);
  CHECK(r.quadratic_variables == 3);

  SetPackingInstance free;
  free.Q = Eigen::MatrixXd::Zero(2, 2);
  free.Q(0, 1) = free.Q(1, 0) = 1.0;
  free.c = Eigen::Vector2d(-1, 2);
  free.A = Eigen::MatrixXd(0, 2);
  const QuboModel fs = slack_qubo(free, 5.0);
  CHECK(fs.n == 2);
  for (std::uint64_t m = 0; m < 4; ++m) CHECK(fs.evaluate(oracle::bits(m, 2)) == free.objective()(oracle::bits(m, 2)));
}

TEST_CASE("quadratic QUBO: zero rows add nothing, repeated pairs are summed") {
  SetPackingInstance sp;
  sp.Q = Eigen::MatrixXd::Zero(3, 3);
  sp.c = Eigen::Vector3d(-1, -1, -1);
  sp.A.resize(3, 3);
  sp.A << 0, 0, 0, 1, 1, 0, 1, 1, 0;
  const QuboModel q = quadratic_qubo(sp, -3.0, -2.0);
  CHECK(q.quadratic.size() == 1);
  CHECK(q.quadratic.at({0, 1}) == 2.0 * quadratic_qubo_penalty(-3.0, -2.0));
}

TEST_CASE("half the quadratic penalty is not enough") {
  // f = -10 x1 x2 with x1 + x2 <= 1: z_SP = 0, min f = -10. A weight of
  // (r2 - r1 + 1) / 2 = 5.5 would leave (1,1) at -4.5.
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(2, 2);
  Q(0, 1) = Q(1, 0) = -5.0;
  const SetPackingInstance sp = single_edge(Q, Eigen::Vector2d::Zero());
  const SetPackingBounds b = set_packing_bounds(sp);
  CHECK(b.r1_lb == -10.0);
  CHECK(b.r2_ub == 0.0);
  CHECK(oracle::qubo_optimum(quadratic_qubo(sp, b.r1_lb, b.r2_ub)) == 0);
  const double half = 0.5 * quadratic_qubo_penalty(b.r1_lb, b.r2_ub);
  CHECK(-10.0 + half < 0.0);
}

TEST_CASE("QUBO pair minima equal z_SP on random instances") {
  std::mt19937_64 rng(32);
  for (int k = 0; k < 25; ++k) {
    const int n = 2 + k % 9, m = 1 + k % 5;
    const SetPackingInstance sp = catalog::random_set_packing(rng, n, m);
    const SetPackingBounds b = set_packing_bounds(sp);
    const long long z = oracle::set_packing_optimum(sp);
    CHECK(oracle::qubo_optimum(slack_qubo(sp, b.rho_ub)) == z);
    CHECK(oracle::qubo_optimum(quadratic_qubo(sp, b.r1_lb, b.r2_ub)) == z);
  }
}

TEST_CASE("mixed relaxations") {
  const MixedProblem e6 = catalog::example6();
  const Model b2 = relax_binary(e6, 3.0);
  CHECK(b2.domain.binary_indices().empty());
  CHECK(b2.objective.value(Eigen::VectorXd::Constant(1, 0.5)) == 1.5);
  CHECK(relax_binary(e6, 5.0).objective.value(Eigen::VectorXd::Constant(1, 1.0)) == 2.0);

  const MixedProblem e5 = catalog::example5();
  CHECK(relax_both(e5, 0.0, 0.0).objective.poly == e5.f.poly);
  CHECK(relax_linear(e5, 0.0).objective.poly == e5.f.poly);
  CHECK(relax_both(e5, 0.0, 2.0).objective.poly == relax_binary(e5, 2.0).objective.poly);
  CHECK_THROWS_AS(relax_binary(e5, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(relax_linear(e5, kInf), std::invalid_argument);

  MixedProblem noJ = e5;
  noJ.J.clear();
  CHECK(relax_binary(noJ, 7.0).objective.poly == e5.f.poly);
}

TEST_CASE("relaxations equal f at points feasible for (B)") {
  std::mt19937_64 rng(33);
  for (int k = 0; k < 20; ++k) {
    const MixedProblem mp = catalog::random_pure_binary(rng, 2 + k % 6, k % 3);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << mp.n()); ++m) {
      const Eigen::VectorXd x = oracle::bits(m, mp.n());
      if (mp.m() > 0 && (mp.A * x - mp.b).cwiseAbs().maxCoeff() != 0.0) continue;
      CHECK(relax_linear(mp, 4.0).objective.value(x) == mp.f.value(x));
      CHECK(relax_binary(mp, 4.0).objective.value(x) == mp.f.value(x));
      CHECK(relax_both(mp, 4.0, 9.0).objective.value(x) == mp.f.value(x));
    }
  }
}

TEST_CASE("(B1_y) with a large y matches (B) on pure-binary instances") {
  std::mt19937_64 rng(34);
  for (int k = 0; k < 10; ++k) {
    const MixedProblem mp = catalog::random_pure_binary(rng, 6, 1 + k % 2);
    double best = kInf;
    for (std::uint64_t m = 0; m < 64; ++m) {
      const Eigen::VectorXd x = oracle::bits(m, 6);
      if ((mp.A * x - mp.b).cwiseAbs().maxCoeff() == 0.0) best = std::min(best, mp.f.value(x));
    }
    // Any infeasible integer point has ||Ax-b||^2 >= 1, so y above the f range suffices.
    const double y = coefficient_upper_bound(mp.f, mp.domain()) - coefficient_lower_bound(mp.f, mp.domain()) + 1.0;
    CHECK(brute_force(relax_linear(mp, y)).value == best);
  }
}

TEST_CASE("increasing a penalty never lowers the optimum") {
  std::mt19937_64 rng(35);
  for (int k = 0; k < 20; ++k) {
    const ProblemSpec p = catalog::random_binary_problem(rng, 2 + k % 6, 1 + k % 3);
    double prev = -kInf;
    for (double y : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double v = brute_force(lagrangian_model(p, y)).value;
      CHECK(v >= prev);
      prev = v;
    }
  }
}
