#include "lagr/nonneg.hpp"

#include "lagr/errors.hpp"

#include <cmath>
#include <string>

namespace lagr {

NonnegResult validate_nonneg(const Polynomiald& h, const VarDomain& domain, NonnegOracle oracle,
                             const NonnegOptions& opts) {
  if (h.nvars() != domain.size()) throw std::invalid_argument("validate_nonneg: dimension mismatch");
  if (oracle == NonnegOracle::Exhaustive && !domain.is_finite())
    throw std::invalid_argument("validate_nonneg: exhaustive mode needs a finite domain");

  int grid = opts.grid;
  if (oracle == NonnegOracle::Grid) {
    // Coarsen the grid so the total point count fits under the cap.
    const auto d = static_cast<double>(domain.continuous_indices().size());
    const auto fixed = domain.point_count(0);
    const auto total = domain.point_count(grid);
    if (d > 0 && fixed && *fixed > 0 && (!total || *total > opts.cap)) {
      const double per_axis = std::pow(static_cast<double>(opts.cap) / static_cast<double>(*fixed), 1.0 / d);
      grid = std::max(1, std::min(grid, static_cast<int>(std::floor(per_axis + 1e-9)) - 1));
    }
  }
  const auto count = domain.point_count(grid);
  if (!count || *count > opts.cap)
    throw CapExceeded("validate_nonneg: domain has more than " + std::to_string(opts.cap) + " points");

  std::vector<std::vector<double>> axes;
  for (int i = 0; i < domain.size(); ++i) axes.push_back(domain.values(i, grid));

  NonnegResult r;
  r.pass = true;
  for_each_point(axes, [&](const Eigen::VectorXd& x) {
    if (!r.pass) return;
    ++r.checked;
    const double v = h.evaluate(x);
    if (v < -opts.tol) {
      r.pass = false;
      r.witness = x;
      r.witness_value = v;
    }
  });
  return r;
}

}  // namespace lagr
