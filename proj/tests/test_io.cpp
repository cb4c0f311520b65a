#include "oracles.hpp"

#include "lagr/catalog.hpp"
#include "lagr/errors.hpp"
#include "lagr/io.hpp"
#include "lagr/reformulate.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace lagr;
using nlohmann::json;

namespace {

ProblemSpec parse(const std::string& text) { return std::get<ProblemSpec>(io::parse_problem(json::parse(text))); }

Eigen::VectorXd random_in(std::mt19937_64& rng, const VarDomain& d) {
  Eigen::VectorXd x(d.size());
  for (int i = 0; i < d.size(); ++i) {
    if (d[i].is_binary()) x(i) = static_cast<double>(rng() % 2);
    else x(i) = std::uniform_real_distribution<double>(d[i].lo, d[i].hi)(rng);
  }
  return x;
}

}  // namespace

TEST_CASE("parse a general problem") {
  const ProblemSpec p = parse(R"({
    "nvars": 2,
    "objective": [[[2, 0], 1], [[1, 0], -2], [[0, 0], 1], [[0, 2], 1]],
    "equalities": [[[[1, 0], 2], [[2, 0], -1]]],
    "domain": {"kinds": ["binary", "unit"]},
    "description": "first worked instance"
  })");
  const ProblemSpec ref = catalog::example1();
  CHECK(p.objective.poly == ref.objective.poly);
  CHECK(p.equalities.front() == ref.equalities.front());
  CHECK(p.domain == ref.domain);
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(parse(R"({"nvars": 1, "objective": [], "domain": {"kinds": ["binary"]}, "extra": 1})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 1, "objective": [[[1, 0], 1]], "domain": {"kinds": ["binary"]}})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 1, "objective": [[[-1], 1]], "domain": {"kinds": ["binary"]}})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 1, "objective": [[[1], "a"]], "domain": {"kinds": ["binary"]}})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 2, "objective": [], "domain": {"kinds": ["binary"]}})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 1, "objective": [], "domain": {"kinds": [{"box": [2, 1]}]}})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 1, "objective": [], "domain": {"kinds": ["integer"]}})"), ParseError);
  CHECK_THROWS_AS(parse(R"({"nvars": 0, "objective": [], "domain": {"kinds": []}})"), ParseError);
  CHECK_THROWS_AS(
      parse(R"({"nvars": 2, "objective": [], "domain": {"kinds": ["unit", "unit"]}, "linear": {"A": [[1]], "b": [1]}})"),
      ParseError);
  CHECK_THROWS_AS(io::parse_problem(json::parse(R"({"set_packing": {"c": [1, 1], "A": [[1, 2]]}})")), ParseError);
  CHECK_THROWS_AS(io::parse_problem(json::array()), ParseError);
}

TEST_CASE("problem JSON round trips") {
  std::mt19937_64 rng(51);
  std::vector<ProblemSpec> cases;
  for (const auto& np : catalog::corpus()) cases.push_back(np.problem);
  ProblemSpec lin = catalog::example1();
  lin.linear = LinearSystem{Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Constant(1, 0.5)};
  cases.push_back(lin);
  for (const auto& p : cases) {
    const ProblemSpec back = std::get<ProblemSpec>(io::parse_problem(io::to_json(p)));
    CHECK(back.objective.poly == p.objective.poly);
    CHECK(back.objective.roots == p.objective.roots);
    CHECK(back.domain == p.domain);
    CHECK(back.equalities.size() == p.equalities.size());
    for (int s = 0; s < 50; ++s) {
      const Eigen::VectorXd x = random_in(rng, p.domain);
      CHECK(back.objective.value(x) == p.objective.value(x));
      CHECK(back.residual(x) == p.residual(x));
    }
  }
}

TEST_CASE("set packing and QUBO round trips") {
  const SetPackingInstance p3 = catalog::path3();
  const auto back = std::get<SetPackingInstance>(io::parse_problem(io::to_json(p3)));
  CHECK(back.A == p3.A);
  CHECK(back.c == p3.c);

  const QuboModel q = slack_qubo(p3, 3.0);
  const QuboModel qj = io::qubo_from_json(io::to_json(q));
  CHECK(qj.names == q.names);
  for (std::uint64_t m = 0; m < 32; ++m) CHECK(qj.evaluate(oracle::bits(m, 5)) == q.evaluate(oracle::bits(m, 5)));
  CHECK_THROWS_AS(io::qubo_from_json(json{{"n", 2}, {"bogus", 1}}), ParseError);
}

TEST_CASE(".qubo text carries exact coefficients") {
  QuboModel q;
  q.n = 2;
  q.add_linear(0, 0.1);
  q.add_quadratic(0, 1, -1.0 / 3.0);
  q.offset = 1e-17;
  std::ostringstream os;
  write_qubo_text(os, q);
  std::istringstream is(os.str());
  const QuboModel back = read_qubo_text(is);
  CHECK(back.linear.at(0) == 0.1);
  CHECK(back.quadratic.at({0, 1}) == -1.0 / 3.0);
  CHECK(back.offset == 1e-17);
  CHECK(os.str().find("p qubo 0 2 1 1") != std::string::npos);
}

TEST_CASE("certificate JSON carries provenance and writes inf as a string") {
  PenaltyCertificate c;
  c.tilde_h_lb = kInf;
  c.tilde_h_method = BoundMethod::Exhaustive;
  c.p_star_method = BoundMethod::FeasiblePoint;
  c.d0_star_method = BoundMethod::CoefficientBound;
  c.witness = Eigen::Vector2d(0, 1);
  const json j = io::to_json(c);
  CHECK(j.at("tilde_h_lb") == "inf");
  CHECK(j.at("provenance").at("tilde_h") == "exhaustive");
  CHECK(j.at("provenance").at("p_star") == "feasible-point");
  CHECK(j.at("provenance").at("d0_star") == "coefficient-bound");
  CHECK(j.at("witness") == json::array({0.0, 1.0}));
}

TEST_CASE("bundled corpus files parse") {
  const std::filesystem::path dir(LAGR_CORPUS_DIR);
  REQUIRE(std::filesystem::exists(dir));
  int count = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() != ".json") continue;
    CHECK_NOTHROW(io::read_problem_file(e.path().string()));
    ++count;
  }
  CHECK(count >= 13);
  const auto ex1 = std::get<ProblemSpec>(io::read_problem_file((dir / "example1.json").string()));
  CHECK(ex1.objective.poly == catalog::example1().objective.poly);
  CHECK_THROWS_AS(io::read_problem_file((dir / "missing.json").string()), ParseError);
}
