#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "ordcif/data.hpp"
#include "ordcif/step_function.hpp"

namespace ordcif {

enum class Transform { Identity, Log, CLogLog, Logit };

// phi, its derivative and inverse. Identity is defined everywhere; log needs
// p > 0; cloglog and logit need 0 < p < 1.
struct TransformSpec {
  Transform kind = Transform::Identity;

  double phi(double p) const;
  double derivative(double p) const;
  double inverse(double x) const;
  bool in_domain(double p) const;
  std::string name() const;
};

TransformSpec parse_transform(const std::string& name);

enum class BandWeight { Unit, InverseSd };
enum class BandCenter { Unrestricted, Restricted };

std::string to_string(BandWeight w);
std::string to_string(BandCenter c);
BandWeight parse_weight(const std::string& name);
BandCenter parse_center(const std::string& name);

struct BandOptions {
  double alpha = 0.05;
  // Defaults to [first cause-1 event of the group, common horizon].
  std::optional<std::pair<double, double>> interval;
  TransformSpec transform;
  BandWeight weight = BandWeight::Unit;
  BandCenter center = BandCenter::Unrestricted;
  std::size_t replicates = 1000;
  std::uint64_t seed = 1;
  std::size_t workers = 0;
};

/**
 * Simultaneous band for the cause-1 CIF of one group on [t1, t2]. The
 * breakpoints are t1 followed by the pooled grid points in (t1, t2]; all three
 * functions are constant between them.
 */
struct BandResult {
  std::string group_label;
  std::size_t group_index = 0;
  double t1 = 0.0;
  double t2 = 0.0;
  BandCenter center = BandCenter::Unrestricted;
  double q_alpha = 0.0;
  double alpha = 0.05;
  std::string transform;
  BandWeight weight = BandWeight::Unit;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::size_t n = 0;
  Eigen::VectorXd points;   // t1, then the pooled grid points in (t1, t2]
  Eigen::VectorXd weights;  // g at each breakpoint
  StepFunction lower;
  StepFunction estimate;
  StepFunction upper;
};

/**
 * q_alpha is the replicate quantile of sup_{[t1,t2]} |g(t) phi'(F(t)) Z(t)|
 * with F the unrestricted estimate; the band is
 * phi^{-1}(phi(center(t)) +/- q_alpha / (sqrt(n_i) g(t))) clipped to [0, 1].
 * Both centerings use the same q_alpha.
 */
BandResult compute_band(const MultiGroupDataset& data, std::size_t group, const BandOptions& options);

// Same q_alpha and weights, centered at `center` instead. Throws DomainError if
// the new center leaves the transform's domain at a breakpoint.
BandResult recenter_band(const BandResult& band, const StepFunction& center, BandCenter label);

}  // namespace ordcif
