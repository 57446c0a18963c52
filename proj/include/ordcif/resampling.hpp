#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ordcif/data.hpp"
#include "ordcif/estimators.hpp"
#include "ordcif/step_function.hpp"

namespace ordcif {

/**
 * Counting-process view of one group: its uncensored events ordered by
 * (time, subject index), each with the at-risk count Y(u) = #{L >= u}.
 * One multiplier is attached to each event, in this order.
 */
struct CountingProcessData {
  std::string group_label;
  std::size_t n = 0;
  Eigen::VectorXd event_times;
  Eigen::VectorXi event_causes;  // 1 or 2
  std::vector<std::size_t> subjects;
  Eigen::VectorXd at_risk;

  Eigen::Index event_count() const noexcept { return event_times.size(); }
};

CountingProcessData build_counting(const GroupSample& group);

/**
 * Conditional multiplier process for one group on a fixed grid:
 *
 *   Z(t) = sqrt(n) * [ sum_{cause-1 events u <= t} (1 - F2(u) - F1(t)) V / Y(u)
 *                    + sum_{cause-2 events u <= t} (F1(u) - F1(t)) V / Y(u) ]
 *
 * Everything except the multipliers V is fixed at construction, so each
 * replicate costs one pass over events and grid.
 */
class MultiplierProcess {
 public:
  MultiplierProcess(const CountingProcessData& data, const CifEstimate& cif1, const CifEstimate& cif2,
                    const Eigen::VectorXd& grid);

  Eigen::Index normals_required() const noexcept { return level_.size(); }
  const Eigen::VectorXd& grid() const noexcept { return grid_; }
  // F1 at each grid point.
  const Eigen::VectorXd& cif1_on_grid() const noexcept { return f1_grid_; }

  // Writes Z at every grid point into `out`.
  void evaluate(const Eigen::Ref<const Eigen::VectorXd>& normals, Eigen::Ref<Eigen::VectorXd> out) const;
  Eigen::VectorXd evaluate(const Eigen::Ref<const Eigen::VectorXd>& normals) const;

 private:
  Eigen::VectorXd grid_;
  Eigen::VectorXd level_;   // (1 - F2(u)) / Y(u) for cause 1, F1(u) / Y(u) for cause 2
  Eigen::VectorXd inv_risk_;  // 1 / Y(u)
  std::vector<Eigen::Index> events_through_;  // #events <= grid[m]
  Eigen::VectorXd f1_grid_;
  double root_n_ = 0.0;
};

// One replicate of Z as a step function on `grid`. Throws PreconditionError
// unless there is exactly one normal per uncensored event.
StepFunction zhat_replicate(const CountingProcessData& data, const CifEstimate& cif1, const CifEstimate& cif2,
                            const Eigen::VectorXd& normals, const Eigen::VectorXd& grid);

/**
 * Joint replicate generator for several groups on a shared grid. Replicate r
 * of stream s draws all multipliers from CounterRng(sub_seed(seed, s, r)),
 * group by group in construction order.
 */
class ZhatSampler {
 public:
  ZhatSampler(const std::vector<const GroupSample*>& groups, const Eigen::VectorXd& grid);

  std::size_t group_count() const noexcept { return processes_.size(); }
  const Eigen::VectorXd& grid() const noexcept { return grid_; }
  const MultiplierProcess& process(std::size_t g) const { return processes_.at(g); }
  // Rows are groups, columns grid points.
  void draw(std::uint64_t key, Eigen::MatrixXd& z) const;

 private:
  Eigen::VectorXd grid_;
  std::vector<MultiplierProcess> processes_;
};

struct ReplicateBatch {
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::vector<double> sups;
};

// Maps one joint replicate (groups x grid) to a scalar, usually a supremum.
using ReplicateFunctional = std::function<double(const Eigen::MatrixXd&)>;

inline constexpr std::size_t kMinReplicates = 100;

ReplicateBatch replicate_sups(const ZhatSampler& sampler, const ReplicateFunctional& functional,
                              std::size_t replicates, std::uint64_t seed, std::uint64_t stream = 0,
                              std::size_t workers = 0);

// Convenience form: all groups of the dataset on the pooled grid cut at horizon.
ReplicateBatch replicate_sups(const MultiGroupDataset& data, const ReplicateFunctional& functional,
                              std::size_t replicates, std::uint64_t seed, double horizon,
                              std::uint64_t stream = 0, std::size_t workers = 0);

// The ceil((1 - alpha) B)-th order statistic of the replicate values.
double sup_quantile(const ReplicateBatch& batch, double alpha);

// Grid points <= horizon.
Eigen::VectorXd truncate_grid(const Eigen::VectorXd& grid, double horizon);

}  // namespace ordcif
