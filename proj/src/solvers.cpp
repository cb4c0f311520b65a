#include "lagr/solvers.hpp"

#include "lagr/calibration.hpp"
#include "lagr/errors.hpp"
#include "lagr/reformulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

namespace lagr {

std::string to_string(SolveMode m) { return m == SolveMode::Exhaustive ? "exhaustive" : "heuristic"; }

unsigned worker_threads(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LAGR_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
  }
  return std::max(1u, n);
}

namespace {

/// Flat form of an Objective for fast repeated evaluation.
class CompiledObjective {
 public:
  explicit CompiledObjective(const Objective& f) : roots_(f.roots) {
    for (const auto& [e, c] : f.poly.terms()) {
      Term t{c, {}};
      for (int i = 0; i < f.nvars(); ++i)
        if (e[i] > 0) t.factors.emplace_back(i, e[i]);
      terms_.push_back(std::move(t));
    }
  }

  double operator()(const Eigen::VectorXd& x) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      double m = t.coef;
      for (const auto& [i, k] : t.factors)
        for (int r = 0; r < k; ++r) m *= x(i);
      s += m;
    }
    for (const auto& r : roots_) s += r.coef * std::sqrt(std::max(0.0, x(r.var)));
    return s;
  }

 private:
  struct Term {
    double coef;
    std::vector<std::pair<int, int>> factors;
  };
  std::vector<Term> terms_;
  std::vector<RootTerm> roots_;
};

struct Candidate {
  double value;
  Eigen::VectorXd x;
};

/// Running minimum plus every point within tie_tol of it.
class ArgminCollector {
 public:
  explicit ArgminCollector(double tie_tol) : tol_(tie_tol) {}

  void offer(double v, const Eigen::VectorXd& x) {
    if (v < best_ - tol_) {
      best_ = v;
      std::erase_if(points_, [&](const Candidate& c) { return c.value > best_ + tol_; });
      points_.push_back({v, x});
    } else if (v <= best_ + tol_) {
      best_ = std::min(best_, v);
      points_.push_back({v, x});
    }
  }

  void merge(const ArgminCollector& o) {
    for (const auto& c : o.points_) offer(c.value, c.x);
  }

  double best() const { return best_; }

  std::vector<Eigen::VectorXd> points() const {
    std::vector<Eigen::VectorXd> out;
    for (const auto& c : points_)
      if (c.value <= best_ + tol_) out.push_back(c.x);
    return out;
  }

 private:
  double tol_;
  double best_ = std::numeric_limits<double>::infinity();
  std::vector<Candidate> points_;
};

double linear_residual(const std::optional<LinearSystem>& lin, const Eigen::VectorXd& x) {
  if (!lin || lin->A.rows() == 0) return 0.0;
  return (lin->A * x - lin->b).cwiseAbs().maxCoeff();
}

}  // namespace

SolveReport brute_force(const Model& model, const BruteForceOptions& opts) {
  const VarDomain& dom = model.domain;
  if (dom.size() != model.nvars()) throw std::invalid_argument("brute_force: domain/objective size mismatch");
  const auto count = dom.point_count(opts.grid);
  if (!count || *count > opts.cap)
    throw CapExceeded("brute_force: " + (count ? std::to_string(*count) : std::string("overflowing")) +
                      " points exceed the cap of " + std::to_string(opts.cap));

  std::vector<std::vector<double>> axes;
  for (int i = 0; i < dom.size(); ++i) axes.push_back(dom.values(i, opts.grid));
  const CompiledObjective f(model.objective);

  // Split along the first axis; chunks are merged in order so the result is
  // independent of the thread count.
  const std::size_t lead = axes.empty() ? 1 : axes[0].size();
  const unsigned threads =
      static_cast<unsigned>(std::min<std::size_t>(worker_threads(opts.threads), std::max<std::size_t>(1, lead)));
  std::vector<ArgminCollector> parts(threads, ArgminCollector(opts.tie_tol));
  std::vector<std::uint64_t> evaluated(threads, 0);

  auto work = [&](unsigned t) {
    auto local_axes = axes;
    if (!axes.empty()) {
      const std::size_t begin = lead * t / threads, end = lead * (t + 1) / threads;
      local_axes[0] = std::vector<double>(axes[0].begin() + static_cast<std::ptrdiff_t>(begin),
                                          axes[0].begin() + static_cast<std::ptrdiff_t>(end));
    }
    for_each_point(local_axes, [&](const Eigen::VectorXd& x) {
      if (model.linear && linear_residual(model.linear, x) > opts.tol_h) return;
      ++evaluated[t];
      parts[t].offer(f(x), x);
    });
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  ArgminCollector all(opts.tie_tol);
  for (const auto& p : parts) all.merge(p);
  SolveReport r;
  r.argmin = all.points();
  if (r.argmin.empty()) throw Infeasible("brute_force: no enumerated point satisfies the constraints");
  r.value = all.best();
  r.mode = SolveMode::Exhaustive;
  r.certified = true;
  r.evaluations = std::accumulate(evaluated.begin(), evaluated.end(), std::uint64_t{0});
  for (const auto& x : r.argmin) r.residual = std::max(r.residual, linear_residual(model.linear, x));
  return r;
}

SolveReport brute_force(const Objective& f, const VarDomain& domain, const BruteForceOptions& opts) {
  return brute_force(Model{f, domain, std::nullopt}, opts);
}

SolveReport brute_force(const QuboModel& q, const BruteForceOptions& opts) {
  if (q.n >= 63 || (std::uint64_t{1} << q.n) > opts.cap)
    throw CapExceeded("brute_force: 2^" + std::to_string(q.n) + " exceeds the cap");
  // Gray-code walk: one flip per step keeps each update O(degree).
  const auto adj = q.neighbours();
  std::vector<double> lin(static_cast<std::size_t>(q.n), 0.0);
  for (const auto& [i, v] : q.linear) lin[static_cast<std::size_t>(i)] = v;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(q.n);
  std::vector<double> field = lin;
  double e = q.offset;
  ArgminCollector best(opts.tie_tol);
  best.offer(e, x);
  const std::uint64_t total = std::uint64_t{1} << q.n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int i = std::countr_zero(k);
    const auto ui = static_cast<std::size_t>(i);
    const double s = x(i) > 0.5 ? -1.0 : 1.0;
    e += s * field[ui];
    x(i) = 1.0 - x(i);
    for (const auto& [j, v] : adj[ui]) field[static_cast<std::size_t>(j)] += s * v;
    best.offer(e, x);
  }
  SolveReport r;
  r.argmin = best.points();
  // Recompute exactly at the minimizers; the running sum may drift.
  r.value = q.evaluate(r.argmin.front());
  for (const auto& p : r.argmin) r.value = std::min(r.value, q.evaluate(p));
  r.mode = SolveMode::Exhaustive;
  r.evaluations = total;
  return r;
}

// ---------------------------------------------------------------------------
// Projection

PolytopeProjector::PolytopeProjector(Eigen::VectorXd lo, Eigen::VectorXd hi, std::optional<LinearSystem> linear)
    : lo_(std::move(lo)), hi_(std::move(hi)), linear_(std::move(linear)) {
  if (linear_ && linear_->A.rows() == 0) linear_.reset();
  if (linear_ && linear_->A.rows() > 1)
    pinv_ = linear_->A.completeOrthogonalDecomposition().pseudoInverse();
}

double PolytopeProjector::linear_residual(const Eigen::VectorXd& x) const { return lagr::linear_residual(linear_, x); }

bool PolytopeProjector::admissible(const Eigen::VectorXd& x, double tol) const {
  return linear_residual(x) <= tol && (x.array() >= lo_.array() - tol).all() &&
         (x.array() <= hi_.array() + tol).all();
}

Eigen::VectorXd PolytopeProjector::project_affine(const Eigen::VectorXd& v) const {
  return v - pinv_ * (linear_->A * v - linear_->b);
}

Eigen::VectorXd PolytopeProjector::project_single_row(const Eigen::VectorXd& v) const {
  // x(l) = clip(v - l a) and a.x(l) is nonincreasing in l; solve a.x(l) = beta.
  const Eigen::VectorXd a = linear_->A.row(0).transpose();
  const double beta = linear_->b(0);
  auto at = [&](double l) -> Eigen::VectorXd { return (v - l * a).cwiseMax(lo_).cwiseMin(hi_); };
  auto phi = [&](double l) { return a.dot(at(l)); };
  if (a.squaredNorm() == 0.0) return v.cwiseMax(lo_).cwiseMin(hi_);
  double l_lo = -1.0, l_hi = 1.0;
  for (int k = 0; k < 200 && phi(l_lo) < beta; ++k) l_lo *= 2.0;
  for (int k = 0; k < 200 && phi(l_hi) > beta; ++k) l_hi *= 2.0;
  for (int k = 0; k < 200 && l_hi - l_lo > 1e-15 * (1.0 + std::abs(l_lo) + std::abs(l_hi)); ++k) {
    const double mid = 0.5 * (l_lo + l_hi);
    if (phi(mid) > beta) l_lo = mid;
    else l_hi = mid;
  }
  double l = 0.5 * (l_lo + l_hi);
  // Polish with the exact solve on the free set found by bisection.
  Eigen::VectorXd x = at(l);
  double free_aa = 0.0, free_av = 0.0, fixed = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double t = v(i) - l * a(i);
    if (a(i) != 0.0 && t > lo_(i) && t < hi_(i)) {
      free_aa += a(i) * a(i);
      free_av += a(i) * v(i);
    } else {
      fixed += a(i) * x(i);
    }
  }
  if (free_aa > 0.0) {
    const double l_exact = (free_av + fixed - beta) / free_aa;
    const Eigen::VectorXd y = at(l_exact);
    if (std::abs(a.dot(y) - beta) <= std::abs(a.dot(x) - beta)) x = y;
  }
  return x;
}

Eigen::VectorXd PolytopeProjector::project(const Eigen::VectorXd& v) const {
  if (!linear_) return v.cwiseMax(lo_).cwiseMin(hi_);
  if (linear_->A.rows() == 1) return project_single_row(v);
  // Dykstra: alternating projections with correction terms converge to the
  // projection onto the intersection.
  Eigen::VectorXd x = v, p = Eigen::VectorXd::Zero(v.size()), q = Eigen::VectorXd::Zero(v.size());
  for (int it = 0; it < 20000; ++it) {
    const Eigen::VectorXd y = project_affine(x + p);
    p = x + p - y;
    const Eigen::VectorXd xn = (y + q).cwiseMax(lo_).cwiseMin(hi_);
    q = y + q - xn;
    const double change = (xn - x).cwiseAbs().maxCoeff();
    x = xn;
    if (change < 1e-15 && linear_residual(x) < 1e-12) break;
  }
  return x;
}

// ---------------------------------------------------------------------------
// Projected gradient

Eigen::VectorXd descend(const Objective& f, const PolytopeProjector& proj, Eigen::VectorXd x, const BoxOptions& opts) {
  x = proj.project(x);
  double fx = f.value(x);
  Eigen::VectorXd g = f.gradient(x);
  const double gmax = g.cwiseAbs().maxCoeff();
  double t = gmax > 0.0 ? std::min(1.0, 1.0 / gmax) : 1.0;
  // Steps far beyond the box only clip, and huge trial points cost the
  // single-row projection its accuracy.
  const double width = std::max(1.0, (proj.hi() - proj.lo()).maxCoeff());
  for (int it = 0; it < opts.max_iter; ++it) {
    Eigen::VectorXd xn;
    double fn = 0.0;
    bool accepted = false;
    const double gi = g.cwiseAbs().maxCoeff();
    if (gi > 0.0) t = std::min(t, 4.0 * width / gi);
    for (int bt = 0; bt < 80; ++bt) {
      xn = proj.project(x - t * g);
      const Eigen::VectorXd d = xn - x;
      if (d.cwiseAbs().maxCoeff() < opts.step_tol) return x;
      fn = f.value(xn);
      if (fn <= fx + opts.armijo * g.dot(d)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) return x;
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd gn = f.gradient(xn);
    const double sy = s.dot(gn - g);
    t = sy > 0.0 ? s.squaredNorm() / sy : 4.0 * t;
    t = std::clamp(t, 1e-20, 1e20);
    const double drop = fx - fn;
    x = std::move(xn);
    g = gn;
    fx = fn;
    if (drop <= 1e-16 * (1.0 + std::abs(fx)) && s.cwiseAbs().maxCoeff() < 1e-10) break;
  }
  return x;
}

namespace {

std::vector<Eigen::VectorXd> scan_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int budget) {
  const auto n = static_cast<double>(lo.size());
  int k = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(budget), 1.0 / n) + 1e-9)));
  while (k > 2 && std::pow(k, n) > budget) --k;
  std::vector<std::vector<double>> axes;
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    std::vector<double> a;
    if (lo(i) == hi(i)) a.push_back(lo(i));
    else
      for (int j = 0; j < k; ++j) a.push_back(j == k - 1 ? hi(i) : lo(i) + (hi(i) - lo(i)) * j / (k - 1));
    axes.push_back(std::move(a));
  }
  std::vector<Eigen::VectorXd> pts;
  if (std::pow(k, n) <= budget) for_each_point(axes, [&](const Eigen::VectorXd& x) { pts.push_back(x); });
  return pts;
}

}  // namespace

SolveReport box_minimize(const Model& model, const BoxOptions& opts) {
  const VarDomain box = model.domain.relaxed();
  const int n = model.nvars();
  const Eigen::VectorXd lo = box.lower(), hi = box.upper();
  const PolytopeProjector proj(lo, hi, model.linear);
  if (!proj.admissible(proj.project(0.5 * (lo + hi)), 1e-7))
    throw Infeasible("box_minimize: {x in box : A x = b} appears empty");

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int starts = std::max(1, opts.starts);

  // Coarse scan: keep the best half of the start budget.
  std::vector<Candidate> scanned;
  for (const auto& p : scan_grid(lo, hi, opts.scan_budget)) {
    const Eigen::VectorXd x = proj.project(p);
    scanned.push_back({model.objective.value(x), x});
  }
  std::stable_sort(scanned.begin(), scanned.end(),
                   [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
  std::vector<Eigen::VectorXd> seeds;
  for (const auto& c : scanned) {
    if (static_cast<int>(seeds.size()) >= (starts + 1) / 2) break;
    const bool dup = std::any_of(seeds.begin(), seeds.end(),
                                 [&](const Eigen::VectorXd& s) { return (s - c.x).cwiseAbs().maxCoeff() < 1e-12; });
    if (!dup) seeds.push_back(c.x);
  }
  // Corners next, then uniform points.
  const int corner_budget = (starts - static_cast<int>(seeds.size()) + 1) / 2;
  if (n < 30 && (1LL << n) <= corner_budget) {
    for (long long mask = 0; mask < (1LL << n); ++mask) {
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c(i) = (mask >> i) & 1 ? hi(i) : lo(i);
      seeds.push_back(c);
    }
  } else {
    for (int k = 0; k < corner_budget; ++k) {
      Eigen::VectorXd c(n);
      for (int i = 0; i < n; ++i) c(i) = unit(rng) < 0.5 ? lo(i) : hi(i);
      seeds.push_back(c);
    }
  }
  while (static_cast<int>(seeds.size()) < starts) {
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = lo(i) + (hi(i) - lo(i)) * unit(rng);
    seeds.push_back(c);
  }

  std::vector<Candidate> results(seeds.size(), Candidate{0.0, Eigen::VectorXd()});
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(worker_threads(), seeds.size()));
  auto work = [&](unsigned t) {
    for (std::size_t s = t; s < seeds.size(); s += threads) {
      Eigen::VectorXd x = descend(model.objective, proj, seeds[s], opts);
      results[s] = {model.objective.value(x), std::move(x)};
    }
  };
  if (threads <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  std::erase_if(results, [&](const Candidate& c) { return !proj.admissible(c.x); });
  if (results.empty()) throw Infeasible("box_minimize: no descent ended on {x in box : A x = b}");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : results) best = std::min(best, c.value);
  SolveReport r;
  for (const auto& c : results) {
    if (c.value > best + opts.tie_tol) continue;
    const bool dup = std::any_of(r.argmin.begin(), r.argmin.end(),
                                 [&](const Eigen::VectorXd& p) { return (p - c.x).cwiseAbs().maxCoeff() < 1e-6; });
    if (!dup) r.argmin.push_back(c.x);
  }
  std::sort(r.argmin.begin(), r.argmin.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  r.value = best;
  r.mode = SolveMode::Heuristic;
  r.certified = false;
  r.seed = opts.seed;
  r.evaluations = seeds.size();
  for (const auto& x : r.argmin) r.residual = std::max(r.residual, proj.linear_residual(x));
  return r;
}

SolveReport box_minimize(const Objective& f, const VarDomain& box, const BoxOptions& opts) {
  return box_minimize(Model{f, box, std::nullopt}, opts);
}

// ---------------------------------------------------------------------------
// Annealing

SolveReport anneal_qubo(const QuboModel& q, const AnnealOptions& opts) {
  SolveReport r;
  r.mode = SolveMode::Heuristic;
  r.certified = false;
  r.seed = opts.seed;
  if (q.n == 0) {
    r.value = q.offset;
    r.argmin.push_back(Eigen::VectorXd(0));
    return r;
  }
  const auto n = static_cast<std::size_t>(q.n);
  const auto adj = q.neighbours();
  std::vector<double> lin(n, 0.0);
  for (const auto& [i, v] : q.linear) lin[static_cast<std::size_t>(i)] = v;

  double t0 = opts.t_start, t1 = opts.t_end;
  if (t0 <= 0.0 || t1 <= 0.0) {
    double max_delta = 0.0, min_coef = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::abs(lin[i]);
      if (lin[i] != 0.0) min_coef = std::min(min_coef, std::abs(lin[i]));
      for (const auto& [j, v] : adj[i]) {
        d += std::abs(v);
        min_coef = std::min(min_coef, std::abs(v));
      }
      max_delta = std::max(max_delta, d);
    }
    if (!std::isfinite(min_coef)) min_coef = 1.0;
    if (t0 <= 0.0) t0 = std::max(max_delta, 1e-12);
    if (t1 <= 0.0) t1 = std::min(t0, min_coef / 10.0);
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd x(q.n);
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = unit(rng) < 0.5 ? 0.0 : 1.0;
  std::vector<double> field = lin;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& [j, v] : adj[i]) field[i] += v * x(j);
  double e = q.evaluate(x);
  double best_e = e;
  Eigen::VectorXd best_x = x;

  const int sweeps = std::max(1, opts.sweeps);
  const double ratio = sweeps > 1 ? std::pow(t1 / t0, 1.0 / (sweeps - 1)) : 1.0;
  double temp = t0;
  for (int s = 0; s < sweeps; ++s, temp *= ratio) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double sign = x(ii) > 0.5 ? -1.0 : 1.0;
      const double delta = sign * field[i];
      if (delta <= 0.0 || unit(rng) < std::exp(-delta / temp)) {
        x(ii) = 1.0 - x(ii);
        e += delta;
        for (const auto& [j, v] : adj[i]) field[static_cast<std::size_t>(j)] += sign * v;
        if (e < best_e - 1e-12) {
          best_e = e;
          best_x = x;
        }
      }
    }
    if (opts.record_trace) {
      std::ostringstream os;
      os.precision(17);
      os << "sweep=" << s << " T=" << temp << " E=" << e << " best=" << best_e;
      r.trace.push_back(os.str());
    }
  }
  r.value = q.evaluate(best_x);
  r.argmin.push_back(best_x);
  r.evaluations = static_cast<std::uint64_t>(sweeps) * n;
  return r;
}

// ---------------------------------------------------------------------------
// Escalation

double EscalationSchedule::y(int step) const { return y0 * std::pow(growth, step); }

bool EscalationResult::all_checks_pass() const {
  return std::all_of(steps.begin(), steps.end(), [](const EscalationStep& s) {
    return s.monotone && s.below_feasible_value && s.residual_within_bound;
  });
}

EscalationResult escalate(const ProblemSpec& problem, const EscalationSchedule& schedule,
                          const EscalationOptions& opts) {
  problem.validate();
  if (!(schedule.y0 > 0.0) || !(schedule.growth > 1.0) || schedule.max_steps < 1)
    throw std::invalid_argument("escalate: need y0 > 0, growth > 1, max_steps >= 1");
  const auto hs = problem.effective_equalities();
  auto residual = [&](const Eigen::VectorXd& x) {
    double r = 0.0;
    for (const auto& h : hs) r = std::max(r, std::abs(h.evaluate(x)));
    return r;
  };

  EscalationResult out;
  // Sample X for a feasible upper bound on (P)* and for M = max |f|.
  {
    BruteForceOptions scan = opts.brute;
    const VarDomain& dom = problem.domain;
    const auto fixed = dom.point_count(0);
    const auto d = static_cast<double>(dom.continuous_indices().size());
    int grid = scan.grid;
    const auto total = dom.point_count(grid);
    if (d > 0 && fixed && (!total || *total > scan.cap))
      grid = std::max(1, static_cast<int>(std::pow(static_cast<double>(scan.cap) / *fixed, 1.0 / d)) - 1);
    const auto count = dom.point_count(grid);
    if (!count || *count > scan.cap) throw CapExceeded("escalate: domain sample exceeds the cap");
    std::vector<std::vector<double>> axes;
    for (int i = 0; i < dom.size(); ++i) axes.push_back(dom.values(i, grid));
    out.p_star_ub = kInf;
    for_each_point(axes, [&](const Eigen::VectorXd& x) {
      const double fx = problem.objective.value(x);
      out.f_abs_max = std::max(out.f_abs_max, std::abs(fx));
      if (residual(x) <= opts.brute.tol_h) out.p_star_ub = std::min(out.p_star_ub, fx);
    });
  }
  const double f_ub = coefficient_upper_bound(problem.objective, problem.domain);

  double prev = -kInf;
  for (int l = 0; l < schedule.max_steps; ++l) {
    EscalationStep st;
    st.step = l;
    st.y = schedule.y(l);
    const Model dy = lagrangian_model(problem, st.y);
    st.report = opts.inner == InnerSolver::BruteForce ? brute_force(dy, opts.brute) : box_minimize(dy, opts.box);
    const Eigen::VectorXd& x = st.report.best();
    st.residual = residual(x);
    st.report.residual = st.residual;
    const double v = st.report.value;
    const double slack = opts.check_tol * (1.0 + std::abs(v));
    st.monotone = v >= prev - slack;
    st.below_feasible_value = v <= out.p_star_ub + slack;
    st.residual_bound = (out.p_star_ub + out.f_abs_max) / st.y;
    double hsum = 0.0;
    for (const auto& h : hs) hsum += h.evaluate(x);
    st.residual_within_bound = hsum <= st.residual_bound + slack;
    out.steps.push_back(st);
    if (v > f_ub + slack)
      throw Diverged("escalate: (D_y)* = " + std::to_string(v) + " exceeds sup f <= " + std::to_string(f_ub) +
                     " at y = " + std::to_string(st.y) + "; X and H do not intersect");
    // Weak duality: a value reaching the feasible upper bound is optimal.
    const bool at_bound = std::abs(v - out.p_star_ub) < schedule.value_tol;
    if ((at_bound || (l > 0 && std::abs(v - prev) < schedule.value_tol)) && st.residual < schedule.residual_tol) {
      out.converged = true;
      break;
    }
    prev = v;
  }
  return out;
}

void write_escalation_csv(std::ostream& os, const EscalationResult& r) {
  os << "step,y,value,residual,point\n";
  os.precision(17);
  for (const auto& s : r.steps) {
    os << s.step << "," << s.y << "," << s.report.value << "," << s.residual << ",";
    const auto& x = s.report.best();
    for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ";" : "") << x(i);
    os << "\n";
  }
}

// ---------------------------------------------------------------------------
// Rounding

Eigen::VectorXd nint(const Eigen::VectorXd& x, const std::vector<int>& J) {
  Eigen::VectorXd r = x;
  for (int i : J) r(i) = std::nearbyint(x(i));  // default rounding mode: ties to even
  return r;
}

SolveReport round_and_reduce(const MixedProblem& mp, const Eigen::VectorXd& x_relaxed, const BoxOptions& opts) {
  mp.validate();
  const int n = mp.n();
  if (x_relaxed.size() != n) throw std::invalid_argument("round_and_reduce: point dimension mismatch");
  const Eigen::VectorXd rounded = nint(x_relaxed, mp.J);
  std::vector<std::pair<int, double>> fixed;
  for (int i : mp.J) {
    const double v = rounded(i);
    if ((v != 0.0 && v != 1.0) || v < mp.lo(i) || v > mp.hi(i))
      throw Infeasible("round_and_reduce: rounded value " + std::to_string(v) + " not admissible for x" +
                       std::to_string(i));
    fixed.emplace_back(i, v);
  }
  std::vector<int> C;
  for (int i = 0; i < n; ++i)
    if (!std::binary_search(mp.J.begin(), mp.J.end(), i)) C.push_back(i);

  SolveReport r;
  r.mode = SolveMode::Heuristic;
  r.certified = false;
  r.seed = opts.seed;
  if (C.empty()) {
    const double res = mp.m() ? (mp.A * rounded - mp.b).cwiseAbs().maxCoeff() : 0.0;
    if (res > 1e-7) throw Infeasible("round_and_reduce: rounded point violates A x = b");
    r.value = mp.f.value(rounded);
    r.argmin.push_back(rounded);
    r.residual = res;
    r.mode = SolveMode::Exhaustive;
    r.certified = true;
    return r;
  }

  // f with x_J fixed, re-indexed onto the continuous coordinates.
  Objective reduced(mp.f.poly.fix(fixed).restrict_to(C));
  for (const auto& root : mp.f.roots) {
    const auto it = std::find(C.begin(), C.end(), root.var);
    if (it != C.end()) {
      reduced.roots.push_back({static_cast<int>(it - C.begin()), root.coef});
    } else {
      reduced.poly += Polynomiald::constant(static_cast<int>(C.size()), root.coef * std::sqrt(rounded(root.var)));
    }
  }
  Eigen::VectorXd lo(C.size()), hi(C.size());
  Eigen::MatrixXd Ac(mp.m(), static_cast<Eigen::Index>(C.size()));
  Eigen::VectorXd b = mp.b;
  for (std::size_t k = 0; k < C.size(); ++k) {
    lo(static_cast<Eigen::Index>(k)) = mp.lo(C[k]);
    hi(static_cast<Eigen::Index>(k)) = mp.hi(C[k]);
    Ac.col(static_cast<Eigen::Index>(k)) = mp.A.col(C[k]);
  }
  for (int i : mp.J) b -= mp.A.col(i) * rounded(i);
  std::optional<LinearSystem> lin;
  if (mp.m() > 0) lin = LinearSystem{Ac, b};

  const SolveReport inner = box_minimize(Model{reduced, VarDomain::box(lo, hi), lin}, opts);
  if (inner.residual > 1e-6) throw Infeasible("round_and_reduce: reduced problem infeasible");
  for (const auto& xc : inner.argmin) {
    Eigen::VectorXd x = rounded;
    for (std::size_t k = 0; k < C.size(); ++k) x(C[k]) = xc(static_cast<Eigen::Index>(k));
    r.argmin.push_back(x);
  }
  r.value = mp.f.value(r.argmin.front());
  for (const auto& x : r.argmin)
    r.residual = std::max(r.residual, mp.m() ? (mp.A * x - mp.b).cwiseAbs().maxCoeff() : 0.0);
  r.evaluations = inner.evaluations;
  return r;
}

}  // namespace lagr
