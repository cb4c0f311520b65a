#include "lagr/qubo.hpp"

#include "lagr/errors.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace lagr {

void QuboModel::add_linear(int i, double v) {
  if (i < 0 || i >= n) throw std::out_of_range("QuboModel: index out of range");
  if (v == 0.0) return;
  auto [it, inserted] = linear.try_emplace(i, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0.0) linear.erase(it);
  }
}

void QuboModel::add_quadratic(int i, int j, double v) {
  if (i == j) return add_linear(i, v);
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n) throw std::out_of_range("QuboModel: index out of range");
  if (v == 0.0) return;
  auto [it, inserted] = quadratic.try_emplace({i, j}, v);
  if (!inserted) {
    it->second += v;
    if (it->second == 0.0) quadratic.erase(it);
  }
}

QuboModel QuboModel::from_polynomial(const Polynomiald& p, std::vector<std::string> names) {
  QuboModel q;
  q.n = p.nvars();
  std::vector<int> all(static_cast<std::size_t>(q.n));
  for (int i = 0; i < q.n; ++i) all[static_cast<std::size_t>(i)] = i;
  const Polynomiald r = p.reduce_binary(all);
  for (const auto& [e, c] : r.terms()) {
    std::vector<int> vars;
    for (int i = 0; i < q.n; ++i)
      if (e[i] > 0) vars.push_back(i);
    switch (vars.size()) {
      case 0: q.offset += c; break;
      case 1: q.add_linear(vars[0], c); break;
      case 2: q.add_quadratic(vars[0], vars[1], c); break;
      default: throw ModeMismatch("QUBO needs degree <= 2 after binary reduction; got " + r.to_string());
    }
  }
  if (!names.empty() && static_cast<int>(names.size()) != q.n)
    throw ParseError("QuboModel: names must have n entries");
  q.names = std::move(names);
  return q;
}

Polynomiald QuboModel::to_polynomial() const {
  Polynomiald p = Polynomiald::constant(n, offset);
  for (const auto& [i, v] : linear) p += Polynomiald::variable(n, i) * v;
  for (const auto& [ij, v] : quadratic)
    p += Polynomiald::variable(n, ij.first) * Polynomiald::variable(n, ij.second) * v;
  return p;
}

double QuboModel::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw std::invalid_argument("QuboModel::evaluate: dimension mismatch");
  double e = offset;
  for (const auto& [i, v] : linear) e += v * x(i);
  for (const auto& [ij, v] : quadratic) e += v * x(ij.first) * x(ij.second);
  return e;
}

double QuboModel::flip_delta(const Eigen::VectorXd& x, int i) const {
  double local = 0.0;
  if (auto it = linear.find(i); it != linear.end()) local += it->second;
  for (const auto& [ij, v] : quadratic) {
    if (ij.first == i) local += v * x(ij.second);
    else if (ij.second == i) local += v * x(ij.first);
  }
  return (x(i) > 0.5 ? -1.0 : 1.0) * local;
}

std::vector<std::vector<std::pair<int, double>>> QuboModel::neighbours() const {
  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (const auto& [ij, v] : quadratic) {
    adj[static_cast<std::size_t>(ij.first)].emplace_back(ij.second, v);
    adj[static_cast<std::size_t>(ij.second)].emplace_back(ij.first, v);
  }
  return adj;
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_qubo_text(std::ostream& os, const QuboModel& q) {
  os << "c offset " << fmt(q.offset) << "\n";
  os << "p qubo 0 " << q.n << " " << q.linear.size() << " " << q.quadratic.size() << "\n";
  for (const auto& [i, v] : q.linear) os << i << " " << i << " " << fmt(v) << "\n";
  for (const auto& [ij, v] : q.quadratic) os << ij.first << " " << ij.second << " " << fmt(v) << "\n";
}

QuboModel read_qubo_text(std::istream& is) {
  QuboModel q;
  bool header = false;
  std::size_t nodes = 0, couplers = 0, seen_nodes = 0, seen_couplers = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == 'c') {
      std::string tag, key;
      ls >> tag >> key;
      if (key == "offset" && !(ls >> q.offset))
        throw ParseError(".qubo line " + std::to_string(lineno) + ": bad offset");
      continue;
    }
    if (line[0] == 'p') {
      std::string p, kind, topology;
      if (!(ls >> p >> kind >> topology >> q.n >> nodes >> couplers) || kind != "qubo")
        throw ParseError(".qubo line " + std::to_string(lineno) + ": bad header");
      header = true;
      continue;
    }
    if (!header) throw ParseError(".qubo line " + std::to_string(lineno) + ": entry before header");
    int i = 0, j = 0;
    double v = 0.0;
    if (!(ls >> i >> j >> v) || i < 0 || j < 0 || i >= q.n || j >= q.n)
      throw ParseError(".qubo line " + std::to_string(lineno) + ": bad entry");
    if (i == j) {
      ++seen_nodes;
      q.add_linear(i, v);
    } else {
      ++seen_couplers;
      q.add_quadratic(i, j, v);
    }
  }
  if (!header) throw ParseError(".qubo: missing 'p qubo' header");
  if (seen_nodes != nodes || seen_couplers != couplers)
    throw ParseError(".qubo: entry counts do not match header");
  return q;
}

}  // namespace lagr
