#include "oracles.hpp"

#include "lagr/catalog.hpp"
#include "lagr/io.hpp"
#include "lagr/verify.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace lagr;
using P = Polynomiald;

TEST_CASE("worked examples replay with example 4 as the only xfail") {
  const VerificationReport r = run_worked_examples();
  CHECK(r.instances() == 7);
  CHECK(r.passed());
  int xfails = 0;
  for (const auto& o : r.outcomes) {
    if (o.xfail) {
      ++xfails;
      CHECK(o.instance == "example4");
    }
  }
  CHECK(xfails == 1);
}

TEST_CASE("suites pass") {
  for (const char* s : {"weak", "reform", "pure"}) {
    CAPTURE(s);
    for (const auto& r : run_suite(s)) CHECK(r.passed());
  }
  CHECK_THROWS_AS(run_suite(""), std::invalid_argument);
  CHECK_THROWS_AS(run_suite("strong"), std::invalid_argument);
}

TEST_CASE("report JSON and table") {
  const VerificationReport r = check_weak_duality(catalog::example1(), {0.0, 1.0, 2.0}, "ex1");
  const auto j = to_json(r);
  CHECK(j.at("passed") == true);
  CHECK(j.at("instances") == 1);
  CHECK(j.at("outcomes").at(0).at("status") == "PASS");
  std::ostringstream os;
  print_table(os, {r});
  CHECK(os.str().find("1 checks, 0 failed") != std::string::npos);
}

TEST_CASE("replay reproduces reformulation failures below the threshold") {
  const nlohmann::json problem = io::to_json(catalog::example1());
  auto witness = [&](double y, const char* check) {
    return nlohmann::json{{"claim", "lagrangian-reformulation"}, {"problem", problem}, {"y", y}, {"check", check}};
  };
  CHECK(replay_witness(witness(0.5, "value")));
  CHECK_FALSE(replay_witness(witness(1.0, "value")));
  CHECK(replay_witness(witness(1.0, "argmin")));
  CHECK_FALSE(replay_witness(witness(1.000001, "argmin")));
  CHECK_FALSE(replay_witness({{"claim", "weak-duality"}, {"problem", problem}, {"y", 7.0}}));
  CHECK_THROWS_AS(replay_witness({{"claim", "other"}, {"problem", problem}, {"y", 1.0}}), std::invalid_argument);
}

TEST_CASE("polytope vertices") {
  const Eigen::VectorXd lo = Eigen::VectorXd::Zero(3), hi = Eigen::VectorXd::Ones(3);
  CHECK(polytope_vertices(lo, hi, std::nullopt).size() == 8);
  LinearSystem ls{Eigen::MatrixXd::Ones(1, 3), Eigen::VectorXd::Constant(1, 1.0)};
  const auto simplex = polytope_vertices(lo, hi, ls);
  CHECK(oracle::same_points(simplex, {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(0, 0, 1)}));
  ls.b(0) = 1.5;
  const auto cut = polytope_vertices(lo, hi, ls);
  CHECK(cut.size() == 6);
  for (const auto& v : cut) CHECK(v.sum() == doctest::Approx(1.5));
  ls.b(0) = 4.0;
  CHECK(polytope_vertices(lo, hi, ls).empty());
}

TEST_CASE("exact mixed oracle agrees with a fine grid") {
  std::mt19937_64 rng(61);
  for (int k = 0; k < 6; ++k) {
    const MixedProblem mp = catalog::random_mixed(rng, 2, 1 + k % 2, 0);
    const MixedOracle o = solve_mixed_exact(mp);
    const int nc = mp.n() - 2, steps = nc == 1 ? 4000 : 300;
    double best = kInf;
    for (int m = 0; m < 4; ++m) {
      Eigen::VectorXd x(mp.n());
      x(0) = m & 1;
      x(1) = (m >> 1) & 1;
      for (int a = 0; a <= steps; ++a)
        for (int b = 0; b <= (nc == 2 ? steps : 0); ++b) {
          x(2) = mp.lo(2) + (mp.hi(2) - mp.lo(2)) * a / steps;
          if (nc == 2) x(3) = mp.lo(3) + (mp.hi(3) - mp.lo(3)) * b / steps;
          best = std::min(best, mp.f.value(x));
        }
    }
    CHECK(o.value <= best + 1e-12);
    CHECK(o.value >= best - 1e-3);
    for (const auto& x : o.argmin) CHECK(mp.f.value(x) == doctest::Approx(o.value).epsilon(1e-9));
  }
}

TEST_CASE("rounding threshold on Example 6") {
  RoundingOutcome out;
  const VerificationReport r = check_rounding(catalog::example6(), {1, 2, 3, 4, 4.9, 5, 6, 8, 16}, "ex6", &out);
  CHECK(r.passed());
  REQUIRE(out.found);
  CHECK(out.threshold == 5.0);
  CHECK(out.reduced_value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("example 7 stationary points match the high-precision references") {
  for (const auto& ref : oracle::example7_reference()) {
    const auto pts = example7_stationary(ref.z);
    REQUIRE(pts.size() == ref.roots.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      CHECK(pts[i].x == doctest::Approx(ref.roots[i]).epsilon(1e-9));
      CHECK(pts[i].kind == (i % 2 == 0 ? 1 : -1));
    }
  }
}

TEST_CASE("example 7 branch CSV") {
  std::ostringstream os;
  write_example7_branches(os, {1.0, 10.0, 1000.0}, 20000);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "z,x1_global_min,x2_local_max,x3_local_min");
  std::vector<int> filled;
  while (std::getline(is, line)) {
    int cells = 0;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    while (std::getline(ss, cell, ',')) cells += !cell.empty();
    filled.push_back(cells);
  }
  REQUIRE(filled.size() == 3);
  CHECK(filled[1] == 3);
  CHECK(filled[2] == 2);
}
