#include "lagr/domain.hpp"

#include "lagr/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace lagr {

VarDomain::VarDomain(std::vector<VarBounds> vars) : vars_(std::move(vars)) {
  for (std::size_t i = 0; i < vars_.size(); ++i) {
    const auto& v = vars_[i];
    if (!(v.lo <= v.hi))
      throw ParseError("domain: lo > hi for variable " + std::to_string(i));
    if (v.kind == VarKind::UnitInterval && (v.lo != 0.0 || v.hi != 1.0))
      throw ParseError("domain: unit interval variable " + std::to_string(i) + " must span [0,1]");
  }
}

VarDomain VarDomain::all_binary(int n) {
  return VarDomain(std::vector<VarBounds>(static_cast<std::size_t>(n), VarBounds::binary()));
}

VarDomain VarDomain::unit_box(int n) {
  return VarDomain(std::vector<VarBounds>(static_cast<std::size_t>(n), VarBounds::unit()));
}

VarDomain VarDomain::box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  std::vector<VarBounds> v;
  for (Eigen::Index i = 0; i < lo.size(); ++i) v.push_back(VarBounds::box(lo(i), hi(i)));
  return VarDomain(std::move(v));
}

VarDomain VarDomain::mixed(int n, const std::vector<int>& binary) {
  std::vector<VarBounds> v(static_cast<std::size_t>(n), VarBounds::unit());
  for (int i : binary) v.at(static_cast<std::size_t>(i)) = VarBounds::binary();
  return VarDomain(std::move(v));
}

std::vector<int> VarDomain::binary_indices() const {
  std::vector<int> J;
  for (int i = 0; i < size(); ++i)
    if (vars_[i].is_binary()) J.push_back(i);
  return J;
}

std::vector<int> VarDomain::continuous_indices() const {
  std::vector<int> C;
  for (int i = 0; i < size(); ++i)
    if (!vars_[i].is_binary()) C.push_back(i);
  return C;
}

bool VarDomain::is_finite() const {
  return std::all_of(vars_.begin(), vars_.end(),
                     [](const VarBounds& v) { return v.is_binary() || v.lo == v.hi; });
}

Eigen::VectorXd VarDomain::lower() const {
  Eigen::VectorXd lo(size());
  for (int i = 0; i < size(); ++i) lo(i) = vars_[i].lo;
  return lo;
}

Eigen::VectorXd VarDomain::upper() const {
  Eigen::VectorXd hi(size());
  for (int i = 0; i < size(); ++i) hi(i) = vars_[i].hi;
  return hi;
}

std::vector<Interval> VarDomain::intervals() const {
  std::vector<Interval> box;
  for (const auto& v : vars_) box.push_back({v.lo, v.hi});
  return box;
}

VarDomain VarDomain::relaxed() const {
  std::vector<VarBounds> v;
  for (const auto& b : vars_) {
    if (!b.is_binary()) v.push_back(b);
    else if (b.lo == 0.0 && b.hi == 1.0) v.push_back(VarBounds::unit());
    else v.push_back(VarBounds::box(b.lo, b.hi));
  }
  return VarDomain(std::move(v));
}

std::vector<double> VarDomain::values(int i, int grid) const {
  const auto& v = vars_.at(static_cast<std::size_t>(i));
  if (v.is_binary()) {
    std::vector<double> out;
    for (double b : {0.0, 1.0})
      if (b >= v.lo && b <= v.hi) out.push_back(b);
    return out;
  }
  if (v.lo == v.hi || grid <= 0) return {v.lo};
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(grid) + 1);
  for (int k = 0; k <= grid; ++k) out.push_back(k == grid ? v.hi : v.lo + (v.hi - v.lo) * k / grid);
  return out;
}

std::optional<std::uint64_t> VarDomain::point_count(int grid) const {
  std::uint64_t total = 1;
  for (int i = 0; i < size(); ++i) {
    const auto k = static_cast<std::uint64_t>(values(i, grid).size());
    if (k == 0) return 0;
    if (total > std::numeric_limits<std::uint64_t>::max() / k) return std::nullopt;
    total *= k;
  }
  return total;
}

bool VarDomain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != size()) return false;
  for (int i = 0; i < size(); ++i) {
    const auto& v = vars_[i];
    if (x(i) < v.lo - tol || x(i) > v.hi + tol) return false;
    if (v.is_binary() && std::abs(x(i)) > tol && std::abs(x(i) - 1.0) > tol) return false;
  }
  return true;
}

Eigen::VectorXd VarDomain::clamp(const Eigen::VectorXd& x) const {
  return x.cwiseMax(lower()).cwiseMin(upper());
}

}  // namespace lagr
