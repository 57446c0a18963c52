#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <string>

#include "ordcif/data.hpp"
#include "ordcif/step_function.hpp"

namespace ordcif {

/**
 * Per-time tallies of one group at its distinct observed times.
 *
 * at_risk[m] = #{L >= times[m]}. Failures at a time are counted before
 * censorings at the same time, which the >= in the risk set gives for free.
 */
struct RiskTable {
  Eigen::VectorXd times;
  Eigen::VectorXd at_risk;
  Eigen::VectorXd cause1;
  Eigen::VectorXd cause2;
  Eigen::VectorXd censored;
  std::size_t n = 0;

  Eigen::Index size() const noexcept { return times.size(); }
  const Eigen::VectorXd& events(Cause c) const { return c == Cause::Primary ? cause1 : cause2; }
};

RiskTable tabulate(const GroupSample& group);

// Kaplan-Meier estimate. The stored function is right-continuous, S(t+);
// left() returns the strict-inequality product S(t-) used by the CIF integral.
struct SurvivalEstimate {
  std::string group_label;
  StepFunction s_hat;

  double right(double t) const { return s_hat(t); }
  double left(double t) const { return s_hat.left_limit(t); }
};

struct HazardEstimate {
  std::string group_label;
  Cause cause = Cause::Primary;
  StepFunction lambda_hat;
};

struct CifEstimate {
  std::string group_label;
  Cause cause = Cause::Primary;
  StepFunction f_hat;
  std::size_t n = 0;

  double operator()(double t) const { return f_hat(t); }
};

// (1/n) #{T <= t, cause = c}; uncensored samples only.
CifEstimate empirical_cif(const GroupSample& group, Cause cause);

SurvivalEstimate km_left(const GroupSample& group);

HazardEstimate nelson_aalen(const GroupSample& group, Cause cause);

// Integral of S(u-) against the Nelson-Aalen increments of `cause`.
CifEstimate cif_censored(const GroupSample& group, Cause cause);

// empirical_cif for uncensored groups, cif_censored otherwise.
CifEstimate estimate_cif(const GroupSample& group, Cause cause);

/**
 * Plug-in covariance of sqrt(n_i)(F1_hat - F1) at (s, t):
 *
 *   sum_{u <= min(s,t)} [1 - F1(s) - F2(u)][1 - F1(t) - F2(u)] dL1(u) / pi(u)
 *                     + [F1(s) - F1(u)][F1(t) - F1(u)] dL2(u) / pi(u)
 *
 * with F, L the censored-data estimates and pi(u) = Y(u)/n. Throws RangeError
 * if either point lies beyond the last observed time, where Y = 0.
 */
double plugin_covariance(const GroupSample& group, double s, double t);

// Covariance kernel on a grid, reusing one set of estimates for all pairs.
class CovarianceKernel {
 public:
  explicit CovarianceKernel(const GroupSample& group);

  const std::string& group_label() const noexcept { return label_; }
  double operator()(double s, double t) const;
  Eigen::MatrixXd on_grid(const Eigen::VectorXd& grid) const;
  Eigen::VectorXd diagonal(const Eigen::VectorXd& grid) const;

 private:
  std::string label_;
  RiskTable table_;
  CifEstimate f1_;
  CifEstimate f2_;
  double last_time_ = 0.0;
};

}  // namespace ordcif
