#include "ordcif/isotonic.hpp"

#include <algorithm>

namespace ordcif {

RestrictedCifSet restrict_cifs(const std::vector<CifEstimate>& estimates, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& grid) {
  const auto k = static_cast<Eigen::Index>(estimates.size());
  if (k == 0) throw PreconditionError("restrict_cifs: no estimates");
  if (weights.size() != k) throw PreconditionError("restrict_cifs: one weight per group is required");
  for (const auto& e : estimates) {
    const auto& knots = e.f_hat.knots();
    for (Eigen::Index j = 0; j < knots.size(); ++j) {
      if (!std::binary_search(grid.data(), grid.data() + grid.size(), knots[j]))
        throw PreconditionError("restrict_cifs: estimate for '" + e.group_label +
                                "' jumps off the shared grid");
    }
  }

  Eigen::MatrixXd raw(k, grid.size());
  for (Eigen::Index i = 0; i < k; ++i)
    raw.row(i) = estimates[static_cast<std::size_t>(i)].f_hat.on_grid(grid).transpose();

  Eigen::MatrixXd projected(k, grid.size());
  for (Eigen::Index m = 0; m < grid.size(); ++m) projected.col(m) = isoreg_weighted(raw.col(m), weights);

  RestrictedCifSet out;
  out.weights = weights;
  out.grid = grid;
  out.values = projected;
  out.estimates.reserve(estimates.size());
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto& src = estimates[static_cast<std::size_t>(i)];
    out.estimates.push_back(CifEstimate{src.group_label, src.cause,
                                        compress<double>(grid, projected.row(i).transpose(), 0.0), src.n});
  }
  return out;
}

}  // namespace ordcif
