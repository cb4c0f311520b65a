#pragma once

#include "lagr/polynomial.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <vector>

namespace lagr {

enum class VarKind { Binary, UnitInterval, Box };

/// One coordinate of the domain. Binary coordinates take the values of
/// {0, 1} that lie in [lo, hi]; continuous ones take all of [lo, hi].
struct VarBounds {
  VarKind kind = VarKind::UnitInterval;
  double lo = 0.0;
  double hi = 1.0;

  static VarBounds binary(double lo = 0.0, double hi = 1.0) { return {VarKind::Binary, lo, hi}; }
  static VarBounds unit() { return {VarKind::UnitInterval, 0.0, 1.0}; }
  static VarBounds box(double lo, double hi) { return {VarKind::Box, lo, hi}; }

  bool is_binary() const { return kind == VarKind::Binary; }

  friend bool operator==(const VarBounds&, const VarBounds&) = default;
};

/// The set X as a product of per-coordinate domains.
class VarDomain {
 public:
  VarDomain() = default;
  explicit VarDomain(std::vector<VarBounds> vars);

  static VarDomain all_binary(int n);
  static VarDomain unit_box(int n);
  static VarDomain box(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
  /// Binary on `binary`, unit interval elsewhere: [0,1]^n intersected with B_J.
  static VarDomain mixed(int n, const std::vector<int>& binary);

  int size() const { return static_cast<int>(vars_.size()); }
  const VarBounds& operator[](int i) const { return vars_[static_cast<std::size_t>(i)]; }
  const std::vector<VarBounds>& vars() const { return vars_; }

  /// Indices J of the binary coordinates, ascending.
  std::vector<int> binary_indices() const;
  std::vector<int> continuous_indices() const;
  bool is_finite() const;

  Eigen::VectorXd lower() const;
  Eigen::VectorXd upper() const;
  std::vector<Interval> intervals() const;

  /// The same box with every binary coordinate relaxed to its interval.
  VarDomain relaxed() const;

  /// Candidate values for coordinate i: the admissible binary values, or
  /// `grid + 1` equally spaced points including both endpoints.
  std::vector<double> values(int i, int grid) const;

  /// Number of points enumerated with the given grid; nullopt on overflow.
  std::optional<std::uint64_t> point_count(int grid) const;

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& x) const;

  friend bool operator==(const VarDomain&, const VarDomain&) = default;

 private:
  std::vector<VarBounds> vars_;
};

/// Default number of grid intervals per continuous coordinate.
inline constexpr int kDefaultGrid = 1000;
/// Default cap on enumerated points.
inline constexpr std::uint64_t kDefaultCap = std::uint64_t{1} << 24;

/// Calls `visit(x)` for every point of the product of `axes`, in
/// lexicographic order with the last coordinate varying fastest.
template <typename Visit>
void for_each_point(const std::vector<std::vector<double>>& axes, Visit&& visit) {
  const std::size_t n = axes.size();
  for (const auto& a : axes)
    if (a.empty()) return;
  std::vector<std::size_t> idx(n, 0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = axes[i][0];
  while (true) {
    visit(static_cast<const Eigen::VectorXd&>(x));
    std::size_t k = n;
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].size()) {
        x(static_cast<Eigen::Index>(k)) = axes[k][idx[k]];
        break;
      }
      idx[k] = 0;
      x(static_cast<Eigen::Index>(k)) = axes[k][0];
      if (k == 0) return;
    }
    if (n == 0) return;
  }
}

}  // namespace lagr
