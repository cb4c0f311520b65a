#include "lagr/calibration.hpp"
#include "lagr/catalog.hpp"
#include "lagr/errors.hpp"
#include "lagr/io.hpp"
#include "lagr/reformulate.hpp"
#include "lagr/solvers.hpp"
#include "lagr/verify.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace {

using namespace lagr;
using nlohmann::json;

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kInfeasible = 3, kNonFinite = 4, kNonneg = 5, kMismatch = 6, kCap = 7 };

struct Config {
  std::string input;
  std::string output;
  std::string mode;
  std::string solver = "brute";
  std::string suite = "all";
  std::string trace;
  std::string replay;
  std::optional<double> y;
  std::optional<double> z;
  std::uint64_t seed = 0;
  int grid = kDefaultGrid;
  std::uint64_t cap = kDefaultCap;
  double tol_h = 1e-9;
  int starts = 64;
  int sweeps = 1000;
  std::vector<double> z_values;
};

CalibrationOptions calib_opts(const Config& c) { return {c.tol_h, c.grid, c.cap}; }

BruteForceOptions brute_opts(const Config& c) {
  BruteForceOptions b;
  b.grid = c.grid;
  b.cap = c.cap;
  b.tol_h = c.tol_h;
  return b;
}

BoxOptions box_opts(const Config& c) {
  BoxOptions b;
  b.seed = c.seed;
  b.starts = c.starts;
  return b;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Writes to --output when given, else stdout.
void emit(const Config& c, const std::string& text) {
  if (c.output.empty()) std::cout << text;
  else io::write_text(c.output, text);
}

ProblemSpec general_problem(const io::ProblemFile& f) {
  if (const auto* p = std::get_if<ProblemSpec>(&f)) return *p;
  return std::get<SetPackingInstance>(f).as_problem();
}

std::string method(BoundMethod m) { return to_string(m); }

int cmd_calibrate(const Config& c) {
  const io::ProblemFile file = io::read_problem_file(c.input);
  std::ostringstream table;
  table << std::setprecision(12);
  json out;
  if (const auto* sp = std::get_if<SetPackingInstance>(&file)) {
    const SetPackingBounds b = set_packing_bounds(*sp, calib_opts(c));
    table << "r1_lb (min f)    " << b.r1_lb << "  [" << method(b.r1_method) << "]\n"
          << "r2_ub (z_SP)     " << b.r2_ub << "  [" << method(b.r2_method) << "]\n"
          << "rho_ub           " << b.rho_ub << "\n"
          << "slack penalty    " << 2.0 * (b.rho_ub + 1.0) << "\n"
          << "quadratic penalty " << quadratic_qubo_penalty(b.r1_lb, b.r2_ub) << "\n";
    out = io::to_json(b);
  } else {
    const PenaltyCertificate cert = calibrate(std::get<ProblemSpec>(file), {}, calib_opts(c));
    table << "tilde_h_lb  " << cert.tilde_h_lb << "  [" << method(cert.tilde_h_method) << "]\n"
          << "p_star_ub   " << cert.p_star_ub << "  [" << method(cert.p_star_method) << "]"
          << (cert.gridded ? " (gridded)" : "") << "\n"
          << "d0_star_lb  " << cert.d0_star_lb << "  [" << method(cert.d0_star_method) << "]\n"
          << "y_valid     " << cert.y_valid << "\n"
          << "y_strict    " << cert.y_strict << (cert.strict ? "  (X \\ H empty: y_valid already strict)" : "") << "\n";
    out = io::to_json(cert);
  }
  std::cerr << table.str();
  emit(c, out.dump(2) + "\n");
  return kOk;
}

void write_model(const Config& c, const Model& m) {
  emit(c, io::to_json(m.as_problem()).dump(2) + "\n");
}

void write_qubo(const Config& c, const QuboModel& q) {
  if (ends_with(c.output, ".qubo")) {
    std::ostringstream os;
    write_qubo_text(os, q);
    emit(c, os.str());
  } else {
    emit(c, io::to_json(q).dump(2) + "\n");
  }
}

int cmd_reformulate(const Config& c) {
  const io::ProblemFile file = io::read_problem_file(c.input);
  json report;
  if (c.mode == "slack" || c.mode == "quadratic") {
    const auto* sp = std::get_if<SetPackingInstance>(&file);
    if (!sp) throw ModeMismatch("mode '" + c.mode + "' needs a set-packing input");
    const SetPackingBounds b = set_packing_bounds(*sp, calib_opts(c));
    const double slack_pen = 2.0 * (b.rho_ub + 1.0);
    const double quad_pen = quadratic_qubo_penalty(b.r1_lb, b.r2_ub);
    write_qubo(c, c.mode == "slack" ? slack_qubo(*sp, b.rho_ub) : quadratic_qubo(*sp, b.r1_lb, b.r2_ub));
    ReformulationReport r = qubo_pair_report(*sp, slack_pen, quad_pen);
    if (c.mode == "quadratic") {
      r.kind = ReformulationKind::QuadraticQubo;
      r.variables = sp->n();
    }
    std::cerr << "variables: slack " << r.slack_variables << " vs quadratic " << r.quadratic_variables << "\n";
    report = io::to_json(r);
  } else if (c.mode == "lagrangian") {
    const ProblemSpec p = general_problem(file);
    const double y = c.y ? *c.y : calibrate(p, {}, calib_opts(c)).y_strict;
    const Model m = lagrangian_model(p, y);
    write_model(c, m);
    report = io::to_json(report_for(ReformulationKind::Lagrangian, m, {y}));
  } else if (c.mode == "b1" || c.mode == "b2" || c.mode == "b3") {
    const auto* p = std::get_if<ProblemSpec>(&file);
    if (!p) throw ModeMismatch("mode '" + c.mode + "' needs a general problem input");
    const MixedProblem mp = MixedProblem::from_problem(*p);
    const double y = c.y.value_or(0.0), z = c.z.value_or(0.0);
    Model m;
    ReformulationKind kind{};
    std::vector<double> pens;
    if (c.mode == "b1") {
      m = relax_linear(mp, y);
      kind = ReformulationKind::RelaxLinear;
      pens = {y};
    } else if (c.mode == "b2") {
      m = relax_binary(mp, z);
      kind = ReformulationKind::RelaxBinary;
      pens = {z};
    } else {
      m = relax_both(mp, y, z);
      kind = ReformulationKind::RelaxBoth;
      pens = {y, z};
    }
    write_model(c, m);
    report = io::to_json(report_for(kind, m, pens));
  } else {
    throw CLI::ValidationError("--mode", "expected slack, quadratic, lagrangian, b1, b2 or b3");
  }
  std::cerr << report.dump() << "\n";
  return kOk;
}

bool is_qubo_input(const std::string& path) {
  if (ends_with(path, ".qubo")) return true;
  const json j = json::parse(io::read_text(path), nullptr, false);
  return j.is_object() && j.contains("quadratic") && j.contains("n");
}

QuboModel qubo_input(const Config& c) {
  if (is_qubo_input(c.input)) return io::read_qubo_file(c.input);
  const io::ProblemFile file = io::read_problem_file(c.input);
  if (const auto* sp = std::get_if<SetPackingInstance>(&file)) {
    const SetPackingBounds b = set_packing_bounds(*sp, calib_opts(c));
    return quadratic_qubo(*sp, b.r1_lb, b.r2_ub);
  }
  const ProblemSpec& p = std::get<ProblemSpec>(file);
  if (!p.domain.is_finite() || p.domain.binary_indices().size() != static_cast<std::size_t>(p.nvars()))
    throw ModeMismatch("annealing needs a QUBO or a problem over {0,1}^n");
  const Model m = c.y ? lagrangian_model(p, *c.y) : Model::from_problem(p);
  if (m.linear) throw ModeMismatch("annealing does not handle A x = b; reformulate first");
  if (!m.objective.is_polynomial()) throw ModeMismatch("annealing needs a polynomial objective");
  return QuboModel::from_polynomial(m.objective.poly, p.names);
}

Model model_input(const Config& c, const ProblemSpec& p) {
  return c.y ? lagrangian_model(p, *c.y) : Model::from_problem(p);
}

int cmd_solve(const Config& c) {
  SolveReport r;
  json out;
  if (c.solver == "anneal") {
    AnnealOptions a;
    a.seed = c.seed;
    a.sweeps = c.sweeps;
    a.record_trace = !c.trace.empty();
    r = anneal_qubo(qubo_input(c), a);
    if (!c.trace.empty()) {
      std::string text;
      for (const auto& line : r.trace) text += line + "\n";
      io::write_text(c.trace, text);
    }
    out = io::to_json(r);
  } else if (c.solver == "brute") {
    if (is_qubo_input(c.input)) {
      r = brute_force(io::read_qubo_file(c.input), brute_opts(c));
    } else {
      r = brute_force(model_input(c, general_problem(io::read_problem_file(c.input))), brute_opts(c));
    }
    out = io::to_json(r);
  } else if (c.solver == "box") {
    r = box_minimize(model_input(c, general_problem(io::read_problem_file(c.input))), box_opts(c));
    out = io::to_json(r);
  } else if (c.solver == "escalate") {
    const ProblemSpec p = general_problem(io::read_problem_file(c.input));
    EscalationSchedule s;
    if (c.y) s.y0 = *c.y;
    EscalationOptions eo;
    eo.box = box_opts(c);
    eo.brute = brute_opts(c);
    eo.check_tol = 1e-7;
    const EscalationResult er = escalate(p, s, eo);
    std::string trace = c.trace;
    if (trace.empty() && !c.output.empty()) trace = std::filesystem::path(c.output).replace_extension(".csv").string();
    if (!trace.empty()) {
      std::ofstream os(trace);
      if (!os) throw std::runtime_error("cannot write " + trace);
      write_escalation_csv(os, er);
    } else {
      write_escalation_csv(std::cerr, er);
    }
    out = io::to_json(er);
  } else {
    throw CLI::ValidationError("--solver", "expected brute, anneal, box or escalate");
  }
  emit(c, out.dump(2) + "\n");
  return kOk;
}

int cmd_verify(const Config& c) {
  if (!c.replay.empty()) {
    const bool reproduced = replay_witness(json::parse(io::read_text(c.replay)));
    std::cout << (reproduced ? "witness reproduces the failure\n" : "witness no longer fails\n");
    return reproduced ? kFail : kOk;
  }
  VerifyOptions vo;
  vo.seed = c.seed ? c.seed : vo.seed;
  vo.brute = brute_opts(c);
  vo.calib = calib_opts(c);
  const auto reports = run_suite(c.suite, vo);
  print_table(std::cout, reports);
  if (!c.output.empty()) {
    json j = json::array();
    for (const auto& r : reports) j.push_back(to_json(r));
    io::write_text(c.output, j.dump(2) + "\n");
  }
  const bool ok = std::all_of(reports.begin(), reports.end(), [](const VerificationReport& r) { return r.passed(); });
  return ok ? kOk : kFail;
}

std::vector<double> default_z_values() {
  std::vector<double> zs;
  for (int k = 0; k <= 60; ++k) zs.push_back(std::pow(10.0, -0.5 + k * 3.5 / 60.0));
  return zs;
}

int cmd_plot_data(const Config& c) {
  std::ostringstream os;
  write_example7_branches(os, c.z_values.empty() ? default_z_values() : c.z_values,
                          c.grid == kDefaultGrid ? 100000 : c.grid);
  emit(c, os.str());
  return kOk;
}

json mixed_file(const MixedProblem& mp, const std::string& description) {
  ProblemSpec p;
  p.objective = mp.f;
  p.domain = mp.domain();
  if (mp.m() > 0) p.linear = mp.linear();
  json j = io::to_json(p);
  j["description"] = description;
  return j;
}

int cmd_corpus(const Config& c) {
  if (c.output.empty()) throw CLI::ValidationError("--output", "corpus needs an output directory");
  std::filesystem::create_directories(c.output);
  auto put = [&](const std::string& name, const json& j) {
    io::write_text((std::filesystem::path(c.output) / (name + ".json")).string(), j.dump(2) + "\n");
  };
  for (const auto& np : catalog::corpus()) {
    if (np.name == "path3") continue;
    json j = io::to_json(np.problem);
    j["description"] = np.name;
    put(np.name, j);
  }
  json sp = io::to_json(catalog::path3());
  sp["description"] = "stable set on the path 1-2-3";
  put("path3", sp);
  put("example5_mixed", mixed_file(catalog::example5(), "x(x-1/2)(x-1), x binary"));
  put("example6_mixed", mixed_file(catalog::example6(), "x(x+1), x binary in [1/2, 1]"));
  put("example7_mixed", mixed_file(catalog::example7(), "-sqrt(x) + 2x(4x^2-2x-1), x binary"));
  ProblemSpec free;
  free.objective = Polynomiald::variable(2, 0) - Polynomiald::variable(2, 1);
  free.domain = VarDomain::all_binary(2);
  json fj = io::to_json(free);
  fj["description"] = "unconstrained";
  put("unconstrained", fj);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified Lagrangian reformulations, QUBO emission and brute-force verification"};
  app.require_subcommand(1, 1);
  Config c;

  auto common = [&](CLI::App* s) {
    s->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
    s->add_option("--grid", c.grid, "Grid intervals per continuous coordinate")->capture_default_str();
    s->add_option("--cap", c.cap, "Maximum enumerated points")->capture_default_str();
    s->add_option("--tol-h", c.tol_h, "|h(x)| <= tol-h counts as feasible")->capture_default_str();
    s->add_option("--output", c.output, "Output file (stdout when omitted)");
  };

  auto* cal = app.add_subcommand("calibrate", "Certified multiplier for a problem file");
  cal->add_option("--input", c.input, "Problem JSON")->required()->check(CLI::ExistingFile);
  common(cal);

  auto* ref = app.add_subcommand("reformulate", "Emit a QUBO or a relaxed model");
  ref->add_option("--input", c.input, "Problem JSON")->required()->check(CLI::ExistingFile);
  ref->add_option("--mode", c.mode, "slack|quadratic|lagrangian|b1|b2|b3")
      ->required()
      ->check(CLI::IsMember({"slack", "quadratic", "lagrangian", "b1", "b2", "b3"}));
  ref->add_option("--y", c.y, "Multiplier (lagrangian defaults to the calibrated strict y; b1/b3 to 0)");
  ref->add_option("--z", c.z, "Binary penalty weight (default 0)");
  common(ref);

  auto* sol = app.add_subcommand("solve", "Solve a model, QUBO or problem");
  sol->add_option("--input", c.input, "Problem JSON, QUBO JSON or .qubo")->required()->check(CLI::ExistingFile);
  sol->add_option("--solver", c.solver, "brute|anneal|box|escalate")
      ->capture_default_str()
      ->check(CLI::IsMember({"brute", "anneal", "box", "escalate"}));
  sol->add_option("--y", c.y, "Solve the Lagrangian at this y (escalate: first y)");
  sol->add_option("--trace", c.trace, "CSV trace (escalate) or sweep log (anneal)");
  sol->add_option("--starts", c.starts, "Multi-start count for box")->capture_default_str();
  sol->add_option("--sweeps", c.sweeps, "Annealing sweeps")->capture_default_str();
  common(sol);

  auto* ver = app.add_subcommand("verify", "Run the oracle suites");
  ver->add_option("--suite", c.suite, "all|weak|reform|pure|rounding|examples")->capture_default_str();
  ver->add_option("--replay", c.replay, "Re-run a failure witness JSON")->check(CLI::ExistingFile);
  common(ver);

  auto* plot = app.add_subcommand("plot-data", "Stationary branches of the sqrt example as CSV");
  plot->add_option("--z-values", c.z_values, "Penalty weights (default: 61 log-spaced values in [0.32, 1000])");
  common(plot);

  auto* corp = app.add_subcommand("corpus", "Write the bundled problem files to a directory");
  common(corp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*cal) return cmd_calibrate(c);
    if (*ref) return cmd_reformulate(c);
    if (*sol) return cmd_solve(c);
    if (*ver) return cmd_verify(c);
    if (*plot) return cmd_plot_data(c);
    if (*corp) return cmd_corpus(c);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const Diverged& e) {
    std::cerr << "diverged: " << e.what() << "\n";
    return kInfeasible;
  } catch (const NotClosed& e) {
    std::cerr << "not certifiable: " << e.what() << "\n";
    return kNonFinite;
  } catch (const NonnegativityViolated& e) {
    std::cerr << "nonnegativity violated: " << e.what() << "\n";
    return kNonneg;
  } catch (const ModeMismatch& e) {
    std::cerr << "mode mismatch: " << e.what() << "\n";
    return kMismatch;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return kCap;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
