#include "ordcif/bands.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ordcif/errors.hpp"
#include "ordcif/estimators.hpp"
#include "ordcif/isotonic.hpp"
#include "ordcif/resampling.hpp"

namespace ordcif {

double TransformSpec::phi(double p) const {
  switch (kind) {
    case Transform::Identity: return p;
    case Transform::Log: return std::log(p);
    case Transform::CLogLog: return std::log(-std::log1p(-p));
    case Transform::Logit: return std::log(p / (1.0 - p));
  }
  return p;
}

double TransformSpec::derivative(double p) const {
  switch (kind) {
    case Transform::Identity: return 1.0;
    case Transform::Log: return 1.0 / p;
    case Transform::CLogLog: return -1.0 / ((1.0 - p) * std::log1p(-p));
    case Transform::Logit: return 1.0 / (p * (1.0 - p));
  }
  return 1.0;
}

double TransformSpec::inverse(double x) const {
  switch (kind) {
    case Transform::Identity: return x;
    case Transform::Log: return std::exp(x);
    case Transform::CLogLog: return -std::expm1(-std::exp(x));
    case Transform::Logit: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

bool TransformSpec::in_domain(double p) const {
  switch (kind) {
    case Transform::Identity: return std::isfinite(p);
    case Transform::Log: return p > 0.0;
    case Transform::CLogLog:
    case Transform::Logit: return p > 0.0 && p < 1.0;
  }
  return false;
}

std::string TransformSpec::name() const {
  switch (kind) {
    case Transform::Identity: return "identity";
    case Transform::Log: return "log";
    case Transform::CLogLog: return "cloglog";
    case Transform::Logit: return "logit";
  }
  return "identity";
}

TransformSpec parse_transform(const std::string& name) {
  if (name == "identity") return {Transform::Identity};
  if (name == "log") return {Transform::Log};
  if (name == "cloglog") return {Transform::CLogLog};
  if (name == "logit") return {Transform::Logit};
  throw ConfigError("unknown transform '" + name + "' (identity, log, cloglog, logit)");
}

std::string to_string(BandWeight w) { return w == BandWeight::Unit ? "unit" : "inverse-sd"; }
std::string to_string(BandCenter c) { return c == BandCenter::Unrestricted ? "unrestricted" : "restricted"; }

BandWeight parse_weight(const std::string& name) {
  if (name == "unit") return BandWeight::Unit;
  if (name == "inverse-sd") return BandWeight::InverseSd;
  throw ConfigError("unknown weight '" + name + "' (unit, inverse-sd)");
}

BandCenter parse_center(const std::string& name) {
  if (name == "unrestricted") return BandCenter::Unrestricted;
  if (name == "restricted") return BandCenter::Restricted;
  throw ConfigError("unknown center '" + name + "' (unrestricted, restricted)");
}

namespace {

std::pair<double, double> default_interval(const MultiGroupDataset& data, const GroupSample& g) {
  double first = HUGE_VAL;
  for (const auto& r : g.records)
    if (r.cause == Cause::Primary) first = std::min(first, r.time);
  if (!std::isfinite(first))
    throw DomainError("group '" + g.label + "' has no cause-1 events; no band can be formed");
  return {first, data.common_horizon()};
}

// t1 followed by the grid points in (t1, t2].
Eigen::VectorXd band_points(const Eigen::VectorXd& grid, double t1, double t2) {
  std::vector<double> pts{t1};
  for (Eigen::Index m = 0; m < grid.size(); ++m)
    if (grid[m] > t1 && grid[m] <= t2) pts.push_back(grid[m]);
  return Eigen::Map<Eigen::VectorXd>(pts.data(), static_cast<Eigen::Index>(pts.size()));
}

}  // namespace

BandResult compute_band(const MultiGroupDataset& data, std::size_t group, const BandOptions& options) {
  if (group >= data.k()) throw ConfigError("group index out of range");
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (options.replicates < kMinReplicates)
    throw ConfigError("at least " + std::to_string(kMinReplicates) + " replicates are required");

  const GroupSample& g = data.group(group);
  const auto [t1, t2] = options.interval ? *options.interval : default_interval(data, g);
  const double last = g.max_time();
  if (!(t1 > 0.0) || !(t1 <= t2) || t2 > last) {
    std::ostringstream msg;
    msg << "band interval [" << t1 << ", " << t2 << "] must satisfy 0 < t1 <= t2 <= " << last
        << " (last observed time of group '" << g.label << "')";
    throw RangeError(msg.str());
  }

  const TransformSpec& phi = options.transform;
  const Eigen::VectorXd points = band_points(pooled_event_grid(data), t1, t2);
  const CifEstimate f1 = cif_censored(g, Cause::Primary);
  const Eigen::VectorXd fhat = f1.f_hat.on_grid(points);
  for (Eigen::Index m = 0; m < points.size(); ++m) {
    if (!phi.in_domain(fhat[m])) {
      std::ostringstream msg;
      msg << "estimate " << fhat[m] << " at t=" << points[m] << " is outside the domain of the " << phi.name()
          << " transform; choose a later t1";
      throw DomainError(msg.str());
    }
  }

  Eigen::VectorXd weight = Eigen::VectorXd::Ones(points.size());
  if (options.weight == BandWeight::InverseSd) {
    const Eigen::VectorXd var = CovarianceKernel(g).diagonal(points);
    for (Eigen::Index m = 0; m < points.size(); ++m) {
      if (!(var[m] > 0.0))
        throw DomainError("zero plug-in variance at t=" + std::to_string(points[m]) +
                          "; inverse-sd weight undefined, choose a later t1");
      weight[m] = 1.0 / std::sqrt(var[m]);
    }
  }

  const Eigen::VectorXd scale = (weight.array() * fhat.unaryExpr([&](double p) { return phi.derivative(p); }).array())
                                    .matrix();
  const ZhatSampler sampler({&g}, points);
  const ReplicateFunctional functional = [&scale](const Eigen::MatrixXd& z) {
    return (scale.array() * z.row(0).transpose().array()).abs().maxCoeff();
  };
  const std::uint64_t stream = (std::uint64_t{1} << 32) + group;
  const ReplicateBatch batch = replicate_sups(sampler, functional, options.replicates, options.seed, stream,
                                              options.workers);
  BandResult out;
  out.group_label = g.label;
  out.group_index = group;
  out.t1 = t1;
  out.t2 = t2;
  out.q_alpha = sup_quantile(batch, options.alpha);
  out.alpha = options.alpha;
  out.transform = phi.name();
  out.weight = options.weight;
  out.replicates = options.replicates;
  out.seed = options.seed;
  out.n = g.size();
  out.points = points;
  out.weights = weight;
  out = recenter_band(out, f1.f_hat, BandCenter::Unrestricted);
  if (options.center == BandCenter::Restricted) {
    std::vector<CifEstimate> all;
    for (const auto& grp : data.groups()) all.push_back(cif_censored(grp, Cause::Primary));
    const RestrictedCifSet restricted = restrict_cifs(all, data.sizes(), pooled_event_grid(data));
    out = recenter_band(out, restricted.estimates[group].f_hat, BandCenter::Restricted);
  }
  return out;
}

BandResult recenter_band(const BandResult& band, const StepFunction& center, BandCenter label) {
  const TransformSpec phi = parse_transform(band.transform);
  const Eigen::VectorXd& points = band.points;
  const Eigen::VectorXd mid = center.on_grid(points);
  for (Eigen::Index m = 0; m < points.size(); ++m) {
    if (!phi.in_domain(mid[m])) {
      std::ostringstream msg;
      msg << to_string(label) << " estimate " << mid[m] << " at t=" << points[m] << " is outside the domain of the "
          << phi.name() << " transform; choose a later t1";
      throw DomainError(msg.str());
    }
  }

  const double root_n = std::sqrt(static_cast<double>(band.n));
  Eigen::VectorXd lower(points.size()), upper(points.size());
  for (Eigen::Index m = 0; m < points.size(); ++m) {
    const double half = band.q_alpha / (root_n * band.weights[m]);
    const double x = phi.phi(mid[m]);
    lower[m] = std::clamp(phi.inverse(x - half), 0.0, 1.0);
    upper[m] = std::clamp(phi.inverse(x + half), 0.0, 1.0);
  }

  BandResult out = band;
  out.center = label;
  out.lower = StepFunction(points, lower, 0.0);
  out.estimate = StepFunction(points, mid, center.left_limit(points.size() ? points[0] : 0.0));
  out.upper = StepFunction(points, upper, 1.0);
  return out;
}

}  // namespace ordcif
