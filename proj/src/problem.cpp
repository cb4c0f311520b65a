#include "lagr/problem.hpp"

#include "lagr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace lagr {

namespace {

void check_linear(const LinearSystem& l, int n, const char* who) {
  if (l.A.cols() != n || l.A.rows() != l.b.size())
    throw ParseError(std::string(who) + ": linear block is " + std::to_string(l.A.rows()) + "x" +
                     std::to_string(l.A.cols()) + " with b of length " + std::to_string(l.b.size()) +
                     ", expected " + std::to_string(n) + " columns");
}

}  // namespace

void ProblemSpec::validate() const {
  const int n = nvars();
  if (n <= 0) throw ParseError("problem: nvars must be positive");
  for (std::size_t j = 0; j < equalities.size(); ++j)
    if (equalities[j].nvars() != n)
      throw ParseError("problem: equality " + std::to_string(j) + " has mismatched nvars");
  if (domain.size() != n) throw ParseError("problem: domain size differs from nvars");
  for (const auto& r : objective.roots) {
    if (r.var < 0 || r.var >= n) throw ParseError("problem: root term index out of range");
    if (domain[r.var].lo < 0.0) throw ParseError("problem: root term on a variable that may be negative");
  }
  if (linear) check_linear(*linear, n, "problem");
  if (!names.empty() && static_cast<int>(names.size()) != n)
    throw ParseError("problem: names must have one entry per variable");
}

std::vector<Polynomiald> ProblemSpec::effective_equalities() const {
  std::vector<Polynomiald> hs = equalities;
  if (linear)
    for (Eigen::Index k = 0; k < linear->A.rows(); ++k)
      hs.push_back(Polynomiald::affine(linear->A.row(k).transpose(), -linear->b(k)).squared());
  return hs;
}

double ProblemSpec::residual(const Eigen::VectorXd& x) const {
  double r = 0.0;
  for (const auto& h : equalities) r = std::max(r, std::abs(h.evaluate(x)));
  if (linear) r = std::max(r, (linear->A * x - linear->b).cwiseAbs().maxCoeff());
  return r;
}

void SetPackingInstance::validate() const {
  const int n = this->n();
  if (n <= 0) throw ParseError("set_packing: c must be nonempty");
  if (Q.rows() != n || Q.cols() != n) throw ParseError("set_packing: Q must be n x n");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw ParseError("set_packing: Q must be symmetric");
  if (A.rows() > 0 && A.cols() != n) throw ParseError("set_packing: A must have n columns");
  for (Eigen::Index k = 0; k < A.rows(); ++k)
    for (Eigen::Index i = 0; i < A.cols(); ++i)
      if (A(k, i) != 0.0 && A(k, i) != 1.0) throw ParseError("set_packing: A must be 0/1");
}

Polynomiald SetPackingInstance::objective() const { return Polynomiald::quadratic_form(Q, c); }

bool SetPackingInstance::feasible(const Eigen::VectorXd& x) const {
  if (A.rows() == 0) return true;
  return ((A * x).array() <= 1.0 + 1e-12).all();
}

ProblemSpec SetPackingInstance::as_problem() const {
  validate();
  const int n = this->n();
  ProblemSpec p;
  p.objective = objective();
  p.domain = VarDomain::all_binary(n);
  for (int k = 0; k < m(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (A(k, i) * A(k, j) == 0.0) continue;
        Exponents e(n, 0);
        e[i] = 1;
        e[j] = 1;
        Polynomiald h(n);
        h.add_term(e, A(k, i) * A(k, j));
        p.equalities.push_back(std::move(h));
      }
  return p;
}

MixedProblem MixedProblem::make(Objective f, Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<int> J) {
  MixedProblem mp;
  const int n = f.nvars();
  mp.f = std::move(f);
  mp.A = A.size() == 0 ? Eigen::MatrixXd(0, n) : std::move(A);
  mp.b = std::move(b);
  mp.J = std::move(J);
  std::sort(mp.J.begin(), mp.J.end());
  mp.lo = Eigen::VectorXd::Zero(n);
  mp.hi = Eigen::VectorXd::Ones(n);
  mp.validate();
  return mp;
}

void MixedProblem::validate() const {
  const int n = this->n();
  if (n <= 0) throw ParseError("mixed problem: empty objective");
  if (A.cols() != n || A.rows() != b.size()) throw ParseError("mixed problem: A x = b dimension mismatch");
  if (lo.size() != n || hi.size() != n) throw ParseError("mixed problem: bounds dimension mismatch");
  for (int i : J)
    if (i < 0 || i >= n) throw ParseError("mixed problem: binary index out of range");
  if (std::adjacent_find(J.begin(), J.end()) != J.end()) throw ParseError("mixed problem: repeated binary index");
  for (int i = 0; i < n; ++i)
    if (!(lo(i) <= hi(i))) throw ParseError("mixed problem: lo > hi");
}

VarDomain MixedProblem::domain() const {
  std::vector<VarBounds> v;
  for (int i = 0; i < n(); ++i) {
    const bool bin = std::binary_search(J.begin(), J.end(), i);
    if (bin) v.push_back(VarBounds::binary(lo(i), hi(i)));
    else if (lo(i) == 0.0 && hi(i) == 1.0) v.push_back(VarBounds::unit());
    else v.push_back(VarBounds::box(lo(i), hi(i)));
  }
  return VarDomain(std::move(v));
}

std::optional<LinearSystem> MixedProblem::linear() const {
  if (A.rows() == 0) return std::nullopt;
  return LinearSystem{A, b};
}

MixedProblem MixedProblem::from_problem(const ProblemSpec& p) {
  p.validate();
  if (!p.equalities.empty())
    throw ModeMismatch("mixed-integer relaxations need a problem whose only constraints are A x = b");
  MixedProblem mp;
  const int n = p.nvars();
  mp.f = p.objective;
  mp.A = p.linear ? p.linear->A : Eigen::MatrixXd(0, n);
  mp.b = p.linear ? p.linear->b : Eigen::VectorXd(0);
  mp.J = p.domain.binary_indices();
  mp.lo = p.domain.lower();
  mp.hi = p.domain.upper();
  mp.validate();
  return mp;
}

ProblemSpec Model::as_problem() const {
  ProblemSpec p;
  p.objective = objective;
  p.domain = domain;
  p.linear = linear;
  return p;
}

Model Model::from_problem(const ProblemSpec& p) {
  if (!p.equalities.empty())
    throw ModeMismatch("problem has nonlinear equalities; reformulate or escalate it first");
  return Model{p.objective, p.domain, p.linear};
}

}  // namespace lagr
