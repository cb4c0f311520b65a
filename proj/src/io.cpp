#include "lagr/io.hpp"

#include "lagr/errors.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lagr::io {

namespace {

void only_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw ParseError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.contains(k)) throw ParseError(where + ": unknown field '" + k + "'");
}

const json& required(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw ParseError(where + ": missing field '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ParseError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(where + ": non-finite number");
  return v;
}

/// JSON has no infinities; they are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ParseError(where + ": expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (rows == 0) return Eigen::MatrixXd(0, 0);
  if (!j[0].is_array()) throw ParseError(where + ": expected an array of rows");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(where + ": ragged matrix at row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c)
      M(r, c) = number(row[static_cast<std::size_t>(c)], where);
  }
  return M;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json out = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    out.push_back(row);
  }
  return out;
}

VarBounds kind_from_json(const json& k, int i) {
  const std::string where = "domain.kinds[" + std::to_string(i) + "]";
  if (k.is_string()) {
    const auto s = k.get<std::string>();
    if (s == "binary") return VarBounds::binary();
    if (s == "unit") return VarBounds::unit();
    throw ParseError(where + ": unknown kind '" + s + "'");
  }
  if (k.is_object() && k.size() == 1) {
    const auto& [name, range] = *k.items().begin();
    if (!range.is_array() || range.size() != 2) throw ParseError(where + ": expected [lo, hi]");
    const double lo = number(range[0], where), hi = number(range[1], where);
    if (name == "box") return VarBounds::box(lo, hi);
    if (name == "binary") return VarBounds::binary(lo, hi);
    throw ParseError(where + ": unknown kind '" + name + "'");
  }
  throw ParseError(where + ": expected \"binary\", \"unit\", {\"box\": [lo, hi]} or {\"binary\": [lo, hi]}");
}

json kind_to_json(const VarBounds& v) {
  switch (v.kind) {
    case VarKind::Binary:
      if (v.lo == 0.0 && v.hi == 1.0) return "binary";
      return json{{"binary", {v.lo, v.hi}}};
    case VarKind::UnitInterval: return "unit";
    case VarKind::Box: return json{{"box", {v.lo, v.hi}}};
  }
  return nullptr;
}

ProblemSpec parse_general(const json& j) {
  only_fields(j, {"nvars", "objective", "objective_sqrt", "equalities", "domain", "linear", "names", "description"},
              "problem");
  const json& nj = required(j, "nvars", "problem");
  if (!nj.is_number_integer() || nj.get<long long>() <= 0) throw ParseError("problem: nvars must be a positive integer");
  const int n = nj.get<int>();

  ProblemSpec p;
  p.objective = Objective(polynomial_from_json(required(j, "objective", "problem"), n));
  if (j.contains("objective_sqrt")) {
    const auto& rs = j.at("objective_sqrt");
    if (!rs.is_array()) throw ParseError("objective_sqrt: expected an array");
    for (const auto& r : rs) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer())
        throw ParseError("objective_sqrt: entries are [var, coef]");
      const int var = r[0].get<int>();
      if (var < 0 || var >= n) throw ParseError("objective_sqrt: variable index out of range");
      p.objective.roots.push_back({var, number(r[1], "objective_sqrt")});
    }
  }
  if (j.contains("equalities")) {
    const auto& es = j.at("equalities");
    if (!es.is_array()) throw ParseError("equalities: expected an array of polynomials");
    for (const auto& e : es) p.equalities.push_back(polynomial_from_json(e, n));
  }
  const json& dom = required(j, "domain", "problem");
  only_fields(dom, {"kinds"}, "domain");
  const json& kinds = required(dom, "kinds", "domain");
  if (!kinds.is_array() || static_cast<int>(kinds.size()) != n)
    throw ParseError("domain.kinds: expected one entry per variable");
  std::vector<VarBounds> vb;
  for (int i = 0; i < n; ++i) vb.push_back(kind_from_json(kinds[static_cast<std::size_t>(i)], i));
  p.domain = VarDomain(std::move(vb));
  if (j.contains("linear")) {
    const auto& l = j.at("linear");
    only_fields(l, {"A", "b"}, "linear");
    LinearSystem ls;
    ls.A = matrix_from_json(required(l, "A", "linear"), "linear.A");
    ls.b = vector_from_json(required(l, "b", "linear"));
    if (ls.A.rows() == 0) ls.A.resize(0, n);
    p.linear = std::move(ls);
  }
  if (j.contains("names")) p.names = j.at("names").get<std::vector<std::string>>();
  p.validate();
  return p;
}

SetPackingInstance parse_set_packing(const json& j) {
  only_fields(j, {"set_packing", "description"}, "problem");
  const json& s = j.at("set_packing");
  only_fields(s, {"Q", "c", "A"}, "set_packing");
  SetPackingInstance sp;
  sp.c = vector_from_json(required(s, "c", "set_packing"));
  const int n = static_cast<int>(sp.c.size());
  sp.Q = s.contains("Q") ? matrix_from_json(s.at("Q"), "set_packing.Q") : Eigen::MatrixXd::Zero(n, n);
  if (sp.Q.size() == 0) sp.Q = Eigen::MatrixXd::Zero(n, n);
  sp.A = matrix_from_json(required(s, "A", "set_packing"), "set_packing.A");
  if (sp.A.rows() == 0) sp.A.resize(0, n);
  sp.validate();
  return sp;
}

}  // namespace

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v(i)));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], "vector");
  return v;
}

json polynomial_to_json(const Polynomiald& p) {
  json out = json::array();
  for (const auto& [e, c] : p.terms()) {
    json ex = json::array();
    for (auto k : e) ex.push_back(k);
    out.push_back(json::array({ex, c}));
  }
  return out;
}

Polynomiald polynomial_from_json(const json& j, int nvars) {
  if (!j.is_array()) throw ParseError("polynomial: expected an array of [exponents, coef] terms");
  Polynomiald p(nvars);
  for (const auto& t : j) {
    if (!t.is_array() || t.size() != 2 || !t[0].is_array())
      throw ParseError("polynomial: each term is [[exponents...], coef]");
    const auto& ex = t[0];
    if (static_cast<int>(ex.size()) != nvars)
      throw ParseError("polynomial: exponent vector has length " + std::to_string(ex.size()) + ", expected " +
                       std::to_string(nvars));
    Exponents e;
    for (const auto& k : ex) {
      if (!k.is_number_integer() || k.get<long long>() < 0 || k.get<long long>() > 64)
        throw ParseError("polynomial: exponents must be integers in [0, 64]");
      e.push_back(static_cast<std::uint16_t>(k.get<int>()));
    }
    p.add_term(e, number(t[1], "polynomial coefficient"));
  }
  return p;
}

ProblemFile parse_problem(const json& j) {
  try {
    if (!j.is_object()) throw ParseError("problem: expected a JSON object");
    if (j.contains("set_packing")) return parse_set_packing(j);
    return parse_general(j);
  } catch (const json::exception& e) {
    throw ParseError(std::string("problem: ") + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

ProblemFile read_problem_file(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parse_problem(j);
}

json to_json(const ProblemSpec& p) {
  json j;
  j["nvars"] = p.nvars();
  j["objective"] = polynomial_to_json(p.objective.poly);
  if (!p.objective.roots.empty()) {
    json rs = json::array();
    for (const auto& r : p.objective.roots) rs.push_back(json::array({r.var, r.coef}));
    j["objective_sqrt"] = rs;
  }
  json es = json::array();
  for (const auto& h : p.equalities) es.push_back(polynomial_to_json(h));
  j["equalities"] = es;
  json kinds = json::array();
  for (const auto& v : p.domain.vars()) kinds.push_back(kind_to_json(v));
  j["domain"] = {{"kinds", kinds}};
  if (p.linear) j["linear"] = {{"A", matrix_to_json(p.linear->A)}, {"b", vector_to_json(p.linear->b)}};
  if (!p.names.empty()) j["names"] = p.names;
  return j;
}

json to_json(const SetPackingInstance& sp) {
  return {{"set_packing", {{"Q", matrix_to_json(sp.Q)}, {"c", vector_to_json(sp.c)}, {"A", matrix_to_json(sp.A)}}}};
}

json to_json(const QuboModel& q) {
  json lin = json::array(), quad = json::array();
  for (const auto& [i, v] : q.linear) lin.push_back(json::array({i, v}));
  for (const auto& [ij, v] : q.quadratic) quad.push_back(json::array({ij.first, ij.second, v}));
  json j{{"n", q.n}, {"offset", q.offset}, {"linear", lin}, {"quadratic", quad}};
  j["names"] = q.names;
  return j;
}

QuboModel qubo_from_json(const json& j) {
  try {
    only_fields(j, {"n", "offset", "linear", "quadratic", "names"}, "qubo");
    QuboModel q;
    q.n = required(j, "n", "qubo").get<int>();
    if (q.n < 0) throw ParseError("qubo: n must be nonnegative");
    q.offset = j.contains("offset") ? number(j.at("offset"), "qubo.offset") : 0.0;
    for (const auto& t : j.value("linear", json::array())) {
      if (!t.is_array() || t.size() != 2) throw ParseError("qubo.linear: entries are [i, value]");
      const int i = t[0].get<int>();
      if (i < 0 || i >= q.n) throw ParseError("qubo.linear: index out of range");
      q.add_linear(i, number(t[1], "qubo.linear"));
    }
    for (const auto& t : j.value("quadratic", json::array())) {
      if (!t.is_array() || t.size() != 3) throw ParseError("qubo.quadratic: entries are [i, j, value]");
      const int a = t[0].get<int>(), b = t[1].get<int>();
      if (a < 0 || b < 0 || a >= q.n || b >= q.n || a == b) throw ParseError("qubo.quadratic: bad index pair");
      q.add_quadratic(a, b, number(t[2], "qubo.quadratic"));
    }
    if (j.contains("names")) q.names = j.at("names").get<std::vector<std::string>>();
    if (!q.names.empty() && static_cast<int>(q.names.size()) != q.n)
      throw ParseError("qubo.names: expected n entries");
    return q;
  } catch (const json::exception& e) {
    throw ParseError(std::string("qubo: ") + e.what());
  }
}

QuboModel read_qubo_file(const std::string& path) {
  if (path.size() >= 5 && path.ends_with(".qubo")) {
    std::istringstream in(read_text(path));
    return read_qubo_text(in);
  }
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return qubo_from_json(j);
}

json to_json(const PenaltyCertificate& c) {
  json j{{"tilde_h_lb", num(c.tilde_h_lb)},
         {"p_star_ub", num(c.p_star_ub)},
         {"d0_star_lb", num(c.d0_star_lb)},
         {"y_valid", num(c.y_valid)},
         {"y_strict", num(c.y_strict)},
         {"strict", c.strict},
         {"gridded", c.gridded},
         {"provenance",
          {{"tilde_h", to_string(c.tilde_h_method)},
           {"p_star", to_string(c.p_star_method)},
           {"d0_star", to_string(c.d0_star_method)}}}};
  if (c.witness.size() > 0) j["witness"] = vector_to_json(c.witness);
  return j;
}

json to_json(const SetPackingBounds& b) {
  return {{"r1_lb", num(b.r1_lb)},
          {"r2_ub", num(b.r2_ub)},
          {"rho_ub", num(b.rho_ub)},
          {"provenance", {{"r1", to_string(b.r1_method)}, {"r2", to_string(b.r2_method)}}}};
}

json to_json(const SolveReport& r) {
  json pts = json::array();
  for (const auto& x : r.argmin) pts.push_back(vector_to_json(x));
  json j{{"value", num(r.value)},
         {"argmin", pts},
         {"mode", to_string(r.mode)},
         {"certified", r.certified},
         {"residual", num(r.residual)},
         {"evaluations", r.evaluations}};
  if (r.mode == SolveMode::Heuristic) j["seed"] = r.seed;
  if (!r.trace.empty()) j["trace"] = r.trace;
  return j;
}

json to_json(const ReformulationReport& r) {
  json j{{"kind", to_string(r.kind)}, {"variables", r.variables}, {"penalties", r.penalties}};
  if (r.slack_variables || r.quadratic_variables) {
    j["slack_variables"] = r.slack_variables;
    j["quadratic_variables"] = r.quadratic_variables;
  }
  return j;
}

json to_json(const EscalationResult& r) {
  json steps = json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"step", s.step},
                     {"y", num(s.y)},
                     {"value", num(s.report.value)},
                     {"residual", num(s.residual)},
                     {"residual_bound", num(s.residual_bound)},
                     {"monotone", s.monotone},
                     {"below_feasible_value", s.below_feasible_value},
                     {"residual_within_bound", s.residual_within_bound},
                     {"point", vector_to_json(s.report.best())}});
  return {{"steps", steps},
          {"converged", r.converged},
          {"p_star_ub", num(r.p_star_ub)},
          {"f_abs_max", num(r.f_abs_max)},
          {"checks_pass", r.all_checks_pass()}};
}

}  // namespace lagr::io
