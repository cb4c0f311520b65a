#include "lagr/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lagr {

double Objective::value(const Eigen::VectorXd& x) const {
  double v = poly.evaluate(x);
  for (const auto& r : roots) v += r.coef * std::sqrt(std::max(0.0, x(r.var)));
  return v;
}

Eigen::VectorXd Objective::gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = poly.gradient(x);
  for (const auto& r : roots) g(r.var) += r.coef / (2.0 * std::sqrt(std::max(kRootFloor, x(r.var))));
  return g;
}

Objective Objective::reduce_binary(const std::vector<int>& binary) const {
  Objective out(poly.reduce_binary(binary));
  for (const auto& r : roots) {
    if (std::find(binary.begin(), binary.end(), r.var) != binary.end())
      out.poly += Polynomiald::variable(nvars(), r.var) * r.coef;
    else
      out.roots.push_back(r);
  }
  return out;
}

}  // namespace lagr
