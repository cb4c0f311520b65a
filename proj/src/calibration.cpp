#include "lagr/calibration.hpp"

#include "lagr/errors.hpp"
#include "lagr/nonneg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace lagr {

namespace {

/// Coarsens the grid so the enumerated point count stays under the cap.
int fit_grid(const VarDomain& dom, int grid, std::uint64_t cap) {
  const auto d = static_cast<double>(dom.continuous_indices().size());
  const auto fixed = dom.point_count(0);
  const auto total = dom.point_count(grid);
  if (d > 0 && fixed && *fixed > 0 && (!total || *total > cap)) {
    const double per_axis = std::pow(static_cast<double>(cap) / static_cast<double>(*fixed), 1.0 / d);
    grid = std::max(1, std::min(grid, static_cast<int>(std::floor(per_axis + 1e-9)) - 1));
  }
  return grid;
}

std::vector<std::vector<double>> axes_for(const VarDomain& dom, int grid, std::uint64_t cap, const char* who) {
  const auto count = dom.point_count(grid);
  if (!count || *count > cap)
    throw CapExceeded(std::string(who) + ": " + (count ? std::to_string(*count) : std::string("overflowing")) +
                      " points exceed the cap of " + std::to_string(cap));
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < dom.size(); ++i) axes.push_back(dom.values(i, grid));
  return axes;
}

bool feasible(const std::vector<Polynomiald>& hs, const Eigen::VectorXd& x, double tol) {
  return std::all_of(hs.begin(), hs.end(), [&](const Polynomiald& h) { return std::abs(h.evaluate(x)) <= tol; });
}

bool depends_only_on(const std::vector<Polynomiald>& hs, const std::vector<int>& allowed, int n) {
  for (const auto& h : hs)
    for (int i = 0; i < n; ++i)
      if (h.depends_on(i) && !std::binary_search(allowed.begin(), allowed.end(), i)) return false;
  return true;
}

double min_distance(const Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& set) {
  double d = kInf;
  for (const auto& p : set) d = std::min(d, (x - p).norm());
  return d;
}

Interval root_range(const RootTerm& r, const VarDomain& dom) {
  const double a = r.coef * std::sqrt(std::max(0.0, dom[r.var].lo));
  const double b = r.coef * std::sqrt(std::max(0.0, dom[r.var].hi));
  return {std::min(a, b), std::max(a, b)};
}

Interval objective_range(const Objective& f, const VarDomain& dom) {
  const Objective reduced = f.reduce_binary(dom.binary_indices());
  Interval r = reduced.poly.range(dom.intervals());
  for (const auto& root : reduced.roots) r = r + root_range(root, dom);
  return r;
}

}  // namespace

Polynomiald h_sum(const ProblemSpec& problem) {
  Polynomiald h(problem.nvars());
  for (const auto& hj : problem.effective_equalities()) h += hj;
  return h;
}

DomainSample sample_domain(const ProblemSpec& problem, const CalibrationOptions& opts) {
  const auto hs = problem.effective_equalities();
  const int grid = fit_grid(problem.domain, opts.grid, opts.cap);
  DomainSample s;
  s.gridded = !problem.domain.continuous_indices().empty();
  for_each_point(axes_for(problem.domain, grid, opts.cap, "sample_domain"), [&](const Eigen::VectorXd& x) {
    (feasible(hs, x, opts.tol_h) ? s.feasible : s.infeasible).push_back(x);
  });
  return s;
}

double h_eps(const ProblemSpec& problem, double eps, const CalibrationOptions& opts) {
  if (!(eps > 0.0)) throw std::invalid_argument("h_eps: eps must be positive");
  const DomainSample s = sample_domain(problem, opts);
  const Polynomiald h = h_sum(problem);
  double best = kInf;
  for (const auto& x : s.infeasible)
    if (min_distance(x, s.feasible) >= eps - 1e-12) best = std::min(best, h.evaluate(x));
  return best;
}

double f_eps(const ProblemSpec& problem, double eps, const CalibrationOptions& opts) {
  if (eps < 0.0) throw std::invalid_argument("f_eps: eps must be nonnegative");
  const DomainSample s = sample_domain(problem, opts);
  double best = kInf;
  for (const auto& x : s.feasible) best = std::min(best, problem.objective.value(x));
  if (eps > 0.0)
    for (const auto& x : s.infeasible)
      if (min_distance(x, s.feasible) <= eps + 1e-12) best = std::min(best, problem.objective.value(x));
  if (best == kInf) throw Infeasible("f_eps: no point of X within eps of H");
  return best;
}

double tilde_h(const ProblemSpec& problem, const CalibrationOptions& opts) {
  problem.validate();
  const auto hs = problem.effective_equalities();
  const VarDomain& dom = problem.domain;
  // With h depending only on binary coordinates the continuous ones can sit
  // anywhere; X \ H is then a finite union of boxes.
  if (!dom.is_finite() && !depends_only_on(hs, dom.binary_indices(), dom.size()))
    throw NotClosed("tilde_h: X has continuous coordinates that the constraints depend on");
  const Polynomiald h = h_sum(problem);
  double best = kInf;
  for_each_point(axes_for(dom, 0, opts.cap, "tilde_h"), [&](const Eigen::VectorXd& x) {
    if (!feasible(hs, x, opts.tol_h)) best = std::min(best, h.evaluate(x));
  });
  return best;
}

std::string to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::Exhaustive: return "exhaustive";
    case BoundMethod::FeasiblePoint: return "feasible-point";
    case BoundMethod::CoefficientBound: return "coefficient-bound";
    case BoundMethod::UserSupplied: return "user-supplied";
  }
  return "unknown";
}

double strict_margin(double y) { return std::max(1.0, std::abs(y)) * kStrictMargin; }

double coefficient_lower_bound(const Objective& f, const VarDomain& domain) {
  return objective_range(f, domain).lo;
}

double coefficient_upper_bound(const Objective& f, const VarDomain& domain) {
  return objective_range(f, domain).hi;
}

namespace {

void check_nonneg(const ProblemSpec& problem, const CalibrationOptions& opts) {
  const VarDomain& dom = problem.domain;
  for (std::size_t j = 0; j < problem.equalities.size(); ++j) {
    const auto& h = problem.equalities[j];
    // A nonnegative interval enclosure settles it without enumeration.
    if (h.reduce_binary(dom.binary_indices()).range(dom.intervals()).lo >= -opts.tol_h) continue;
    NonnegOptions no;
    no.tol = opts.tol_h;
    no.grid = opts.grid;
    no.cap = dom.is_finite() ? opts.cap : std::min<std::uint64_t>(opts.cap, 1000000);
    const auto r = validate_nonneg(h, dom, dom.is_finite() ? NonnegOracle::Exhaustive : NonnegOracle::Grid, no);
    if (!r.pass) {
      std::string at;
      for (Eigen::Index i = 0; i < r.witness->size(); ++i) at += (i ? "," : "") + std::to_string((*r.witness)(i));
      throw NonnegativityViolated("equality " + std::to_string(j) + " is negative (" +
                                  std::to_string(r.witness_value) + ") at (" + at + ")");
    }
  }
}

}  // namespace

PenaltyCertificate calibrate(const ProblemSpec& problem, const BoundOverrides& overrides,
                             const CalibrationOptions& opts) {
  problem.validate();
  const VarDomain& dom = problem.domain;
  for (int i = 0; i < dom.size(); ++i)
    if (!std::isfinite(dom[i].lo) || !std::isfinite(dom[i].hi))
      throw NotClosed("calibrate: unbounded coordinate " + std::to_string(i));
  check_nonneg(problem, opts);

  const auto hs = problem.effective_equalities();
  const Objective& f = problem.objective;
  const int n = problem.nvars();
  PenaltyCertificate c;
  c.p_star_ub = kInf;
  c.d0_star_lb = kInf;
  c.tilde_h_lb = kInf;

  const bool all_given = overrides.tilde_h_lb && overrides.p_star_ub && overrides.d0_star_lb;
  const auto binary_count = dom.point_count(0);
  const bool fits = binary_count && *binary_count <= opts.cap;

  if (all_given) {
    // Nothing to compute.
  } else if (dom.is_finite() && fits) {
    for_each_point(axes_for(dom, 0, opts.cap, "calibrate"), [&](const Eigen::VectorXd& x) {
      const double fx = f.value(x);
      c.d0_star_lb = std::min(c.d0_star_lb, fx);
      if (feasible(hs, x, opts.tol_h)) {
        if (fx < c.p_star_ub) {
          c.p_star_ub = fx;
          c.witness = x;
        }
      } else {
        double hx = 0.0;
        for (const auto& h : hs) hx += h.evaluate(x);
        c.tilde_h_lb = std::min(c.tilde_h_lb, hx);
      }
    });
  } else if (!dom.is_finite() && fits && depends_only_on(hs, dom.binary_indices(), n)) {
    // Enumerate binary patterns; continuous coordinates are gridded for the
    // feasible value and interval-bounded for (D0)*.
    const std::vector<int> J = dom.binary_indices();
    const std::vector<int> C = dom.continuous_indices();
    std::vector<std::vector<double>> jaxes;
    for (int i : J) jaxes.push_back(dom.values(i, 0));
    std::vector<Interval> cbox;
    for (int i : C) cbox.push_back({dom[i].lo, dom[i].hi});
    const int grid = fit_grid(dom, opts.grid, opts.cap);
    std::vector<std::vector<double>> caxes;
    for (int i : C) caxes.push_back(dom.values(i, grid));
    c.gridded = true;
    c.p_star_method = BoundMethod::FeasiblePoint;
    c.d0_star_method = BoundMethod::CoefficientBound;

    Eigen::VectorXd x = dom.lower();
    for_each_point(jaxes, [&](const Eigen::VectorXd& xj) {
      std::vector<std::pair<int, double>> fixed;
      for (std::size_t k = 0; k < J.size(); ++k) {
        x(J[k]) = xj(static_cast<Eigen::Index>(k));
        fixed.emplace_back(J[k], xj(static_cast<Eigen::Index>(k)));
      }
      // Interval bound of f with the binary part fixed.
      Objective g(f.poly.fix(fixed).restrict_to(C));
      Interval r = g.poly.range(cbox);
      for (const auto& root : f.roots) {
        const auto it = std::find(C.begin(), C.end(), root.var);
        if (it != C.end()) r = r + root_range(root, dom);
        else r = r + Interval{root.coef * std::sqrt(x(root.var)), root.coef * std::sqrt(x(root.var))};
      }
      c.d0_star_lb = std::min(c.d0_star_lb, r.lo);
      if (feasible(hs, x, opts.tol_h)) {
        for_each_point(caxes, [&](const Eigen::VectorXd& xc) {
          Eigen::VectorXd p = x;
          for (std::size_t k = 0; k < C.size(); ++k) p(C[k]) = xc(static_cast<Eigen::Index>(k));
          const double fx = f.value(p);
          if (fx < c.p_star_ub) {
            c.p_star_ub = fx;
            c.witness = p;
          }
        });
      } else {
        double hx = 0.0;
        for (const auto& h : hs) hx += h.evaluate(x);
        c.tilde_h_lb = std::min(c.tilde_h_lb, hx);
      }
    });
  } else if (!dom.is_finite() && !depends_only_on(hs, dom.binary_indices(), n)) {
    throw NotClosed("calibrate: constraints depend on continuous coordinates; use escalation instead");
  } else {
    // Past the cap: needs integer constraints on an integer domain.
    const std::vector<int> J = dom.binary_indices();
    const bool integral = std::all_of(hs.begin(), hs.end(), [&](const Polynomiald& h) {
      return h.reduce_binary(J).has_integer_coefficients();
    });
    if (!integral || !dom.is_finite())
      throw CapExceeded("calibrate: domain exceeds the enumeration cap and no integrality fallback applies");
    c.tilde_h_lb = 1.0;
    c.tilde_h_method = BoundMethod::CoefficientBound;
    c.d0_star_lb = coefficient_lower_bound(f, dom);
    c.d0_star_method = BoundMethod::CoefficientBound;
    const Eigen::VectorXd x = overrides.feasible_point ? *overrides.feasible_point : Eigen::VectorXd::Zero(n);
    if (!dom.contains(x) || !feasible(hs, x, opts.tol_h))
      throw CapExceeded("calibrate: past the cap and the " +
                        std::string(overrides.feasible_point ? "supplied point" : "origin") +
                        " is not feasible; supply a feasible point");
    c.p_star_ub = f.value(x);
    c.witness = x;
    c.p_star_method = overrides.feasible_point ? BoundMethod::UserSupplied : BoundMethod::FeasiblePoint;
  }

  if (overrides.tilde_h_lb) {
    c.tilde_h_lb = *overrides.tilde_h_lb;
    c.tilde_h_method = BoundMethod::UserSupplied;
  }
  if (overrides.p_star_ub) {
    c.p_star_ub = *overrides.p_star_ub;
    c.p_star_method = BoundMethod::UserSupplied;
  }
  if (overrides.d0_star_lb) {
    c.d0_star_lb = *overrides.d0_star_lb;
    c.d0_star_method = BoundMethod::UserSupplied;
  }
  if (!(c.tilde_h_lb > 0.0)) throw std::invalid_argument("calibrate: tilde_h lower bound must be positive");
  if (c.p_star_ub == kInf) throw Infeasible("calibrate: X and H do not intersect, so (P)* = +inf");

  // No infeasible point: X is contained in H and every y >= 0 is exact.
  const double ratio = c.tilde_h_lb == kInf ? 0.0 : (c.p_star_ub - c.d0_star_lb) / c.tilde_h_lb;
  c.y_valid = std::max(0.0, ratio);
  c.y_strict = c.y_valid + strict_margin(c.y_valid);
  c.strict = c.tilde_h_lb == kInf;
  return c;
}

SmoothnessBound smoothness_bound(const Objective& f, const std::vector<Interval>& box) {
  const int n = f.nvars();
  if (static_cast<int>(box.size()) != n) throw std::invalid_argument("smoothness_bound: box dimension mismatch");
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Polynomiald di = f.poly.partial(i);
    for (int j = i; j < n; ++j) {
      const double s = di.partial(j).range(box).magnitude();
      H(i, j) = s;
      H(j, i) = s;
    }
  }
  for (const auto& r : f.roots) {
    const double lo = box[static_cast<std::size_t>(r.var)].lo;
    H(r.var, r.var) += lo > 0.0 ? std::abs(r.coef) / (4.0 * std::pow(lo, 1.5)) : kInf;
  }
  SmoothnessBound b;
  b.L_hat = n == 0 ? 0.0 : H.rowwise().sum().maxCoeff();
  return b;
}

SetPackingBounds set_packing_bounds(const SetPackingInstance& sp, const CalibrationOptions& opts) {
  sp.validate();
  const int n = sp.n();
  const Polynomiald f = sp.objective();
  SetPackingBounds b;
  if (n < 63 && (std::uint64_t{1} << n) <= opts.cap) {
    b.r1_lb = kInf;
    b.r2_ub = kInf;
    for_each_point(axes_for(VarDomain::all_binary(n), 0, opts.cap, "set_packing_bounds"),
                   [&](const Eigen::VectorXd& x) {
                     const double fx = f.evaluate(x);
                     b.r1_lb = std::min(b.r1_lb, fx);
                     if (sp.feasible(x)) b.r2_ub = std::min(b.r2_ub, fx);
                   });
  } else {
    // x = 0 is always a packing with value 0.
    b.r1_lb = coefficient_lower_bound(f, VarDomain::all_binary(n));
    b.r2_ub = 0.0;
    b.r1_method = BoundMethod::CoefficientBound;
    b.r2_method = BoundMethod::FeasiblePoint;
  }
  b.rho_ub = std::max(std::abs(b.r1_lb), std::abs(b.r2_ub));
  return b;
}

RatioProbe ratio_boundedness_probe(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const std::function<double(const Eigen::VectorXd&)>& h, double p_star,
                                   const VarDomain& box, const std::vector<Eigen::VectorXd>& feasible_refs,
                                   const ProbeOptions& opts) {
  RatioProbe r;
  r.shell_max.assign(static_cast<std::size_t>(opts.shells), -kInf);
  auto visit = [&](const Eigen::VectorXd& x) -> double {
    ++r.samples;
    const double hx = h(x);
    if (!(hx > opts.tol_h)) return -kInf;
    const double ratio = (p_star - f(x)) / hx;
    r.empirical_sup = std::max(r.empirical_sup, ratio);
    return ratio;
  };
  const std::vector<int> C = box.continuous_indices();
  for (int k = 0; k < opts.shells; ++k) {
    const double d = std::ldexp(1.0, -(k + 1));
    r.shell_distance.push_back(d);
    for (const auto& ref : feasible_refs)
      for (int i : C)
        for (double dir : {-1.0, 1.0}) {
          Eigen::VectorXd x = ref;
          x(i) += dir * d;
          if (x(i) < box[i].lo || x(i) > box[i].hi) continue;
          r.shell_max[static_cast<std::size_t>(k)] = std::max(r.shell_max[static_cast<std::size_t>(k)], visit(x));
        }
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < opts.random_samples; ++s) {
    Eigen::VectorXd x(box.size());
    for (int i = 0; i < box.size(); ++i) {
      const auto& v = box[i];
      if (v.is_binary()) {
        const auto vals = box.values(i, 0);
        x(i) = vals[static_cast<std::size_t>(unit(rng) * static_cast<double>(vals.size())) % vals.size()];
      } else {
        x(i) = v.lo + (v.hi - v.lo) * unit(rng);
      }
    }
    visit(x);
  }
  // Diverging: the innermost shells keep growing well past the outermost one.
  std::vector<double> finite;
  for (double v : r.shell_max)
    if (std::isfinite(v)) finite.push_back(v);
  if (finite.size() >= 5) {
    const std::size_t t = finite.size();
    bool rising = true;
    for (std::size_t k = t - 5; k + 1 < t; ++k) rising = rising && finite[k + 1] > finite[k];
    r.diverging = rising && finite.back() > 1e3 * std::max(1.0, std::abs(finite.front()));
  }
  return r;
}

RatioProbe ratio_boundedness_probe(const ProblemSpec& problem, double p_star,
                                   const std::vector<Eigen::VectorXd>& feasible_refs, const ProbeOptions& opts) {
  const Polynomiald h = h_sum(problem);
  return ratio_boundedness_probe([&](const Eigen::VectorXd& x) { return problem.objective.value(x); },
                                 [&](const Eigen::VectorXd& x) { return h.evaluate(x); }, p_star, problem.domain,
                                 feasible_refs, opts);
}

}  // namespace lagr
