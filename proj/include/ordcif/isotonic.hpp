#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <limits>
#include <vector>

#include "ordcif/errors.hpp"
#include "ordcif/estimators.hpp"

namespace ordcif {

namespace detail {

template <typename DerivedV, typename DerivedW>
void check_isotonic_problem(const Eigen::MatrixBase<DerivedV>& values,
                            const Eigen::MatrixBase<DerivedW>& weights) {
  if (values.size() != weights.size())
    throw PreconditionError("isotonic regression: values and weights differ in length");
  for (Eigen::Index i = 0; i < weights.size(); ++i)
    if (!(weights(i) > 0)) throw PreconditionError("isotonic regression: weights must be positive");
}

}  // namespace detail

/**
 * Weighted least-squares projection of `values` onto the cone
 * {u : u_1 <= ... <= u_k}, by pool-adjacent-violators.
 *
 * Each output block is the weighted mean of the inputs it pools, so the
 * weighted total is preserved.
 */
template <typename DerivedV, typename DerivedW>
Eigen::Matrix<typename DerivedV::Scalar, Eigen::Dynamic, 1> isoreg_weighted(
    const Eigen::MatrixBase<DerivedV>& values, const Eigen::MatrixBase<DerivedW>& weights) {
  using Scalar = typename DerivedV::Scalar;
  detail::check_isotonic_problem(values, weights);
  const Eigen::Index k = values.size();

  struct Block {
    Scalar mean;
    Scalar weight;
    Eigen::Index count;
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    Block cur{values(i), static_cast<Scalar>(weights(i)), 1};
    while (!blocks.empty() && blocks.back().mean > cur.mean) {
      const Block& prev = blocks.back();
      const Scalar w = prev.weight + cur.weight;
      cur = Block{(prev.weight * prev.mean + cur.weight * cur.mean) / w, w, prev.count + cur.count};
      blocks.pop_back();
    }
    blocks.push_back(cur);
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(k);
  Eigen::Index pos = 0;
  for (const auto& b : blocks) {
    out.segment(pos, b.count).setConstant(b.mean);
    pos += b.count;
  }
  return out;
}

// max_{r <= i} min_{s >= i} of the weighted window average over r..s.
// O(k^3); kept as the independent characterization of the projection.
template <typename DerivedV, typename DerivedW>
Eigen::Matrix<typename DerivedV::Scalar, Eigen::Dynamic, 1> isoreg_maxmin(
    const Eigen::MatrixBase<DerivedV>& values, const Eigen::MatrixBase<DerivedW>& weights) {
  using Scalar = typename DerivedV::Scalar;
  detail::check_isotonic_problem(values, weights);
  const Eigen::Index k = values.size();

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> avg(k, k);
  for (Eigen::Index r = 0; r < k; ++r) {
    Scalar num = 0, den = 0;
    for (Eigen::Index s = r; s < k; ++s) {
      num += static_cast<Scalar>(weights(s)) * values(s);
      den += static_cast<Scalar>(weights(s));
      avg(r, s) = num / den;
    }
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index r = 0; r <= i; ++r) {
      Scalar inner = std::numeric_limits<Scalar>::infinity();
      for (Eigen::Index s = i; s < k; ++s) inner = std::min(inner, avg(r, s));
      best = std::max(best, inner);
    }
    out(i) = best;
  }
  return out;
}

// Order-restricted cause-1 CIFs: at every grid point the k-vector of
// estimates is replaced by its isotonic regression with weights n_i.
struct RestrictedCifSet {
  std::vector<CifEstimate> estimates;
  Eigen::VectorXd weights;
  Eigen::VectorXd grid;
  // values(i, m) = restricted F_i at grid[m]
  Eigen::MatrixXd values;
};

RestrictedCifSet restrict_cifs(const std::vector<CifEstimate>& estimates, const Eigen::VectorXd& weights,
                               const Eigen::VectorXd& grid);

}  // namespace ordcif
