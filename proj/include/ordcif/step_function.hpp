#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstddef>
#include <string>

#include "ordcif/errors.hpp"

namespace ordcif {

/**
 * Right-continuous piecewise-constant function on the real line.
 *
 * The value at t is the value attached to the largest knot <= t, or the
 * initial value when t precedes every knot. Every estimator and test process
 * in the library is carried by this type, so suprema and projections taken
 * over the knots are exact.
 */
template <typename Scalar>
class BasicStepFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicStepFunction() = default;

  BasicStepFunction(Vector knots, Vector values, Scalar initial_value = Scalar(0))
      : knots_(std::move(knots)), values_(std::move(values)), initial_(initial_value) {
    if (knots_.size() != values_.size())
      throw PreconditionError("step function: knots and values differ in length");
    for (Eigen::Index i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i - 1] < knots_[i]))
        throw PreconditionError("step function: knots must be strictly increasing");
    }
  }

  const Vector& knots() const noexcept { return knots_; }
  const Vector& values() const noexcept { return values_; }
  Scalar initial_value() const noexcept { return initial_; }
  Eigen::Index size() const noexcept { return knots_.size(); }
  bool empty() const noexcept { return knots_.size() == 0; }

  // Number of knots <= t.
  Eigen::Index count_at_or_before(Scalar t) const {
    const Scalar* first = knots_.data();
    return std::upper_bound(first, first + knots_.size(), t) - first;
  }

  Scalar operator()(Scalar t) const {
    const Eigen::Index i = count_at_or_before(t);
    return i == 0 ? initial_ : values_[i - 1];
  }

  // lim_{s -> t-} f(s)
  Scalar left_limit(Scalar t) const {
    const Scalar* first = knots_.data();
    const Eigen::Index i = std::lower_bound(first, first + knots_.size(), t) - first;
    return i == 0 ? initial_ : values_[i - 1];
  }

  // Jump f(t) - f(t-).
  Scalar jump(Scalar t) const { return (*this)(t)-left_limit(t); }

  // Values at each point of a sorted grid, in one merge pass.
  Vector on_grid(const Vector& grid) const {
    Vector out(grid.size());
    Eigen::Index k = 0;
    Scalar current = initial_;
    for (Eigen::Index g = 0; g < grid.size(); ++g) {
      while (k < knots_.size() && knots_[k] <= grid[g]) current = values_[k++];
      out[g] = current;
    }
    return out;
  }

  // Smallest and largest value attained, including the initial value.
  Scalar max_value() const {
    return values_.size() ? std::max(initial_, values_.maxCoeff()) : initial_;
  }
  Scalar min_value() const {
    return values_.size() ? std::min(initial_, values_.minCoeff()) : initial_;
  }

 private:
  Vector knots_;
  Vector values_;
  Scalar initial_ = Scalar(0);
};

using StepFunction = BasicStepFunction<double>;

template <typename Scalar>
Scalar evaluate(const BasicStepFunction<Scalar>& f, Scalar t) {
  return f(t);
}

// Builds a step function from values on a grid, dropping knots where the value
// does not change. The result agrees with the input at every grid point.
template <typename Scalar>
BasicStepFunction<Scalar> compress(const typename BasicStepFunction<Scalar>::Vector& grid,
                                   const typename BasicStepFunction<Scalar>::Vector& values,
                                   Scalar initial_value) {
  using Vector = typename BasicStepFunction<Scalar>::Vector;
  Vector knots(grid.size()), kept(grid.size());
  Eigen::Index m = 0;
  Scalar last = initial_value;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    if (values[i] != last) {
      knots[m] = grid[i];
      kept[m] = values[i];
      last = values[i];
      ++m;
    }
  }
  return BasicStepFunction<Scalar>(knots.head(m), kept.head(m), initial_value);
}

}  // namespace ordcif
