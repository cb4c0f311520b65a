#pragma once

#include "lagr/problem.hpp"

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace lagr::catalog {

/// f = (x1-1)^2 + x2^2, h = x1(2-x1), x1 binary, x2 in [0,1].
/// (P)* = 1 at (0,0); (D0)* = 0 at (1,0); tilde h = 1.
ProblemSpec example1();

/// f = x, h = x^2 over [0,1]. A finite multiplier exists although X \ H is not closed.
ProblemSpec example2();

/// f = x, h = x^2 over [-1,1]. No finite multiplier: (D_y)* = y-1 or -1/(4y).
ProblemSpec example3();
/// Closed form of min over [-1,1] of x + y x^2.
double example3_dual_value(double y);

/// f = x(x-1/2)(x-1) with x binary: concave relaxation once z > 3/2.
MixedProblem example5();

/// f = x(x+1) with x binary in [1/2, 1]: relaxation optimum switches at z = 5.
MixedProblem example6();

/// f = -sqrt(x) + 2x(4x^2-2x-1) with x binary: not L-smooth, no finite z.
MixedProblem example7();
/// The same instance as min f s.t. x(1-x) = 0 over [0,1], for escalation.
ProblemSpec example7_problem();

/// d/dx of f(x) + z x(1-x) for the example-7 objective.
double example7_slope(double x, double z);

/// Path graph 1-2-3 stable set: c = -e, Q = 0, one row per edge.
SetPackingInstance path3();

/// Integer-coefficient generators (coefficients in [-5, 5], degree <= 2).
/// Every instance is feasible by construction.
ProblemSpec random_binary_problem(std::mt19937_64& rng, int n, int m);
SetPackingInstance random_set_packing(std::mt19937_64& rng, int n, int m);
/// J = all variables, 0..2 linear rows.
MixedProblem random_pure_binary(std::mt19937_64& rng, int n, int m);
/// |J| binary plus `continuous` unit-interval variables, 0..1 linear rows.
MixedProblem random_mixed(std::mt19937_64& rng, int binary, int continuous, int m);

struct NamedProblem {
  std::string name;
  ProblemSpec problem;
};

/// The bundled corpus: worked examples plus seeded random instances.
std::vector<NamedProblem> corpus();

}  // namespace lagr::catalog
