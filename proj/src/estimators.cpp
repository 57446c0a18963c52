#include "ordcif/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ordcif/errors.hpp"

namespace ordcif {

RiskTable tabulate(const GroupSample& group) {
  if (group.records.empty()) throw DataError("group '" + group.label + "' is empty");
  std::vector<FailureRecord> sorted = group.records;
  std::sort(sorted.begin(), sorted.end(),
            [](const FailureRecord& a, const FailureRecord& b) { return a.time < b.time; });

  std::vector<double> times, at_risk, d1, d2, dc;
  const std::size_t n = sorted.size();
  std::size_t i = 0;
  while (i < n) {
    const double u = sorted[i].time;
    times.push_back(u);
    at_risk.push_back(static_cast<double>(n - i));
    double c1 = 0, c2 = 0, c0 = 0;
    for (; i < n && sorted[i].time == u; ++i) {
      switch (sorted[i].cause) {
        case Cause::Primary: c1 += 1; break;
        case Cause::Other: c2 += 1; break;
        case Cause::Censored: c0 += 1; break;
      }
    }
    d1.push_back(c1);
    d2.push_back(c2);
    dc.push_back(c0);
  }

  auto to_vec = [](std::vector<double>& v) {
    return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
  };
  RiskTable t;
  t.times = to_vec(times);
  t.at_risk = to_vec(at_risk);
  t.cause1 = to_vec(d1);
  t.cause2 = to_vec(d2);
  t.censored = to_vec(dc);
  t.n = n;
  return t;
}

CifEstimate empirical_cif(const GroupSample& group, Cause cause) {
  if (cause == Cause::Censored) throw PreconditionError("empirical_cif: cause must be 1 or 2");
  if (group.censored())
    throw PreconditionError("empirical_cif: group '" + group.label +
                            "' contains censored records; use cif_censored");
  const RiskTable t = tabulate(group);
  const auto& d = t.events(cause);
  const double n = static_cast<double>(t.n);

  std::vector<double> knots, values;
  double count = 0;
  for (Eigen::Index m = 0; m < t.size(); ++m) {
    if (d[m] == 0) continue;
    count += d[m];
    knots.push_back(t.times[m]);
    values.push_back(count / n);
  }
  const auto k = static_cast<Eigen::Index>(knots.size());
  return CifEstimate{group.label, cause,
                     StepFunction(Eigen::Map<Eigen::VectorXd>(knots.data(), k),
                                  Eigen::Map<Eigen::VectorXd>(values.data(), k), 0.0),
                     t.n};
}

SurvivalEstimate km_left(const GroupSample& group) {
  const RiskTable t = tabulate(group);
  std::vector<double> knots, values;
  double s = 1.0;
  for (Eigen::Index m = 0; m < t.size(); ++m) {
    const double d = t.cause1[m] + t.cause2[m];
    if (d == 0) continue;
    s *= 1.0 - d / t.at_risk[m];
    knots.push_back(t.times[m]);
    values.push_back(s);
  }
  const auto k = static_cast<Eigen::Index>(knots.size());
  return SurvivalEstimate{group.label,
                          StepFunction(Eigen::Map<Eigen::VectorXd>(knots.data(), k),
                                       Eigen::Map<Eigen::VectorXd>(values.data(), k), 1.0)};
}

HazardEstimate nelson_aalen(const GroupSample& group, Cause cause) {
  if (cause == Cause::Censored) throw PreconditionError("nelson_aalen: cause must be 1 or 2");
  const RiskTable t = tabulate(group);
  const auto& d = t.events(cause);
  std::vector<double> knots, values;
  double lambda = 0.0;
  for (Eigen::Index m = 0; m < t.size(); ++m) {
    if (d[m] == 0) continue;
    lambda += d[m] / t.at_risk[m];
    knots.push_back(t.times[m]);
    values.push_back(lambda);
  }
  const auto k = static_cast<Eigen::Index>(knots.size());
  return HazardEstimate{group.label, cause,
                        StepFunction(Eigen::Map<Eigen::VectorXd>(knots.data(), k),
                                     Eigen::Map<Eigen::VectorXd>(values.data(), k), 0.0)};
}

CifEstimate cif_censored(const GroupSample& group, Cause cause) {
  if (cause == Cause::Censored) throw PreconditionError("cif_censored: cause must be 1 or 2");
  const RiskTable t = tabulate(group);
  const auto& d = t.events(cause);

  // S(u-)/Y(u) is the probability mass carried by each subject still at risk.
  // It starts at 1/n and changes only when censored subjects hand their mass to
  // the survivors, so it is kept as a ratio and the CIF as base + count * ratio.
  // Without censoring this is count/n, bit-identical to the empirical CIF.
  double mass_num = 1.0;
  double mass_den = static_cast<double>(t.n);
  double base = 0.0;
  double pending = 0.0;

  std::vector<double> knots, values;
  for (Eigen::Index m = 0; m < t.size(); ++m) {
    if (d[m] > 0) {
      pending += d[m];
      knots.push_back(t.times[m]);
      values.push_back(base + pending * mass_num / mass_den);
    }
    if (t.censored[m] > 0) {
      const double failed = t.cause1[m] + t.cause2[m];
      const double survivors = t.at_risk[m] - failed;
      const double remaining = survivors - t.censored[m];
      base += pending * mass_num / mass_den;
      pending = 0.0;
      if (remaining > 0) {
        mass_num = (mass_num / mass_den) * survivors / remaining;
        mass_den = 1.0;
      }
    }
  }
  const auto k = static_cast<Eigen::Index>(knots.size());
  return CifEstimate{group.label, cause,
                     StepFunction(Eigen::Map<Eigen::VectorXd>(knots.data(), k),
                                  Eigen::Map<Eigen::VectorXd>(values.data(), k), 0.0),
                     t.n};
}

CifEstimate estimate_cif(const GroupSample& group, Cause cause) {
  return group.censored() ? cif_censored(group, cause) : empirical_cif(group, cause);
}

CovarianceKernel::CovarianceKernel(const GroupSample& group)
    : label_(group.label),
      table_(tabulate(group)),
      f1_(cif_censored(group, Cause::Primary)),
      f2_(cif_censored(group, Cause::Other)),
      last_time_(table_.times[table_.size() - 1]) {}

double CovarianceKernel::operator()(double s, double t) const {
  if (s > t) std::swap(s, t);
  if (t > last_time_)
    throw RangeError("covariance requested at t=" + std::to_string(t) + " beyond the last observed time " +
                     std::to_string(last_time_) + " of group '" + label_ + "'; truncate the horizon");
  const double n = static_cast<double>(table_.n);
  const double f1s = f1_(s);
  const double f1t = f1_(t);
  double acc = 0.0;
  for (Eigen::Index m = 0; m < table_.size() && table_.times[m] <= s; ++m) {
    const double d1 = table_.cause1[m];
    const double d2 = table_.cause2[m];
    if (d1 == 0 && d2 == 0) continue;
    const double y = table_.at_risk[m];
    if (y <= 0) throw RangeError("covariance: empty risk set; truncate the horizon");
    const double pi = y / n;
    const double u = table_.times[m];
    const double f1u = f1_(u);
    const double f2u = f2_(u);
    if (d1 > 0) acc += (1.0 - f1s - f2u) * (1.0 - f1t - f2u) * (d1 / y) / pi;
    if (d2 > 0) acc += (f1s - f1u) * (f1t - f1u) * (d2 / y) / pi;
  }
  return acc;
}

Eigen::MatrixXd CovarianceKernel::on_grid(const Eigen::VectorXd& grid) const {
  const Eigen::Index m = grid.size();
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index a = 0; a < m; ++a)
    for (Eigen::Index b = a; b < m; ++b) cov(a, b) = cov(b, a) = (*this)(grid[a], grid[b]);
  return cov;
}

Eigen::VectorXd CovarianceKernel::diagonal(const Eigen::VectorXd& grid) const {
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index a = 0; a < grid.size(); ++a) out[a] = (*this)(grid[a], grid[a]);
  return out;
}

double plugin_covariance(const GroupSample& group, double s, double t) {
  return CovarianceKernel(group)(s, t);
}

}  // namespace ordcif
