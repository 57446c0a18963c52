#include "ordcif/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ordcif/errors.hpp"
#include "ordcif/parallel.hpp"
#include "ordcif/rng.hpp"

namespace ordcif {

CountingProcessData build_counting(const GroupSample& group) {
  const std::size_t n = group.size();
  if (n == 0) throw DataError("group '" + group.label + "' is empty");

  std::vector<double> sorted_times;
  sorted_times.reserve(n);
  for (const auto& r : group.records) sorted_times.push_back(r.time);
  std::sort(sorted_times.begin(), sorted_times.end());

  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < n; ++j)
    if (group.records[j].failed()) order.push_back(j);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double ta = group.records[a].time, tb = group.records[b].time;
    return ta < tb || (ta == tb && a < b);
  });

  CountingProcessData out;
  out.group_label = group.label;
  out.n = n;
  const auto m = static_cast<Eigen::Index>(order.size());
  out.event_times.resize(m);
  out.event_causes.resize(m);
  out.at_risk.resize(m);
  out.subjects = order;
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto& r = group.records[order[static_cast<std::size_t>(e)]];
    out.event_times[e] = r.time;
    out.event_causes[e] = static_cast<int>(r.cause);
    const auto before = std::lower_bound(sorted_times.begin(), sorted_times.end(), r.time) - sorted_times.begin();
    out.at_risk[e] = static_cast<double>(n - static_cast<std::size_t>(before));
  }
  return out;
}

MultiplierProcess::MultiplierProcess(const CountingProcessData& data, const CifEstimate& cif1,
                                     const CifEstimate& cif2, const Eigen::VectorXd& grid)
    : grid_(grid), root_n_(std::sqrt(static_cast<double>(data.n))) {
  if (cif1.cause != Cause::Primary || cif2.cause != Cause::Other)
    throw PreconditionError("multiplier process: expected cause-1 and cause-2 estimates");
  const Eigen::Index m = data.event_count();
  level_.resize(m);
  inv_risk_.resize(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const double u = data.event_times[e];
    const double y = data.at_risk[e];
    inv_risk_[e] = 1.0 / y;
    level_[e] = data.event_causes[e] == 1 ? (1.0 - cif2(u)) / y : cif1(u) / y;
  }
  events_through_.resize(static_cast<std::size_t>(grid.size()));
  for (Eigen::Index g = 0; g < grid.size(); ++g) {
    const double* first = data.event_times.data();
    events_through_[static_cast<std::size_t>(g)] = std::upper_bound(first, first + m, grid[g]) - first;
  }
  f1_grid_ = cif1.f_hat.on_grid(grid);
}

void MultiplierProcess::evaluate(const Eigen::Ref<const Eigen::VectorXd>& normals,
                                 Eigen::Ref<Eigen::VectorXd> out) const {
  if (normals.size() != level_.size())
    throw PreconditionError("multiplier process: expected " + std::to_string(level_.size()) +
                            " normals, got " + std::to_string(normals.size()));
  double weighted = 0.0;
  double plain = 0.0;
  Eigen::Index e = 0;
  for (Eigen::Index g = 0; g < grid_.size(); ++g) {
    for (const Eigen::Index stop = events_through_[static_cast<std::size_t>(g)]; e < stop; ++e) {
      weighted += level_[e] * normals[e];
      plain += inv_risk_[e] * normals[e];
    }
    out[g] = root_n_ * (weighted - f1_grid_[g] * plain);
  }
}

Eigen::VectorXd MultiplierProcess::evaluate(const Eigen::Ref<const Eigen::VectorXd>& normals) const {
  Eigen::VectorXd out(grid_.size());
  evaluate(normals, out);
  return out;
}

StepFunction zhat_replicate(const CountingProcessData& data, const CifEstimate& cif1, const CifEstimate& cif2,
                            const Eigen::VectorXd& normals, const Eigen::VectorXd& grid) {
  const MultiplierProcess process(data, cif1, cif2, grid);
  return StepFunction(grid, process.evaluate(normals), 0.0);
}

ZhatSampler::ZhatSampler(const std::vector<const GroupSample*>& groups, const Eigen::VectorXd& grid)
    : grid_(grid) {
  processes_.reserve(groups.size());
  for (const GroupSample* g : groups) {
    processes_.emplace_back(build_counting(*g), cif_censored(*g, Cause::Primary), cif_censored(*g, Cause::Other),
                            grid);
  }
}

void ZhatSampler::draw(std::uint64_t key, Eigen::MatrixXd& z) const {
  z.resize(static_cast<Eigen::Index>(processes_.size()), grid_.size());
  CounterRng rng(key);
  Eigen::VectorXd normals;
  Eigen::VectorXd row(grid_.size());
  for (std::size_t g = 0; g < processes_.size(); ++g) {
    const auto& p = processes_[g];
    normals.resize(p.normals_required());
    for (Eigen::Index e = 0; e < normals.size(); ++e) normals[e] = rng.normal();
    p.evaluate(normals, row);
    z.row(static_cast<Eigen::Index>(g)) = row.transpose();
  }
}

ReplicateBatch replicate_sups(const ZhatSampler& sampler, const ReplicateFunctional& functional,
                              std::size_t replicates, std::uint64_t seed, std::uint64_t stream,
                              std::size_t workers) {
  if (replicates == 0) throw ConfigError("replicate count must be positive");
  ReplicateBatch batch{replicates, seed, stream, std::vector<double>(replicates)};
  parallel_for(
      replicates,
      [&](std::size_t r) {
        Eigen::MatrixXd z;
        sampler.draw(sub_seed(seed, stream, r), z);
        batch.sups[r] = functional(z);
      },
      workers);
  return batch;
}

Eigen::VectorXd truncate_grid(const Eigen::VectorXd& grid, double horizon) {
  const double* first = grid.data();
  const auto keep = std::upper_bound(first, first + grid.size(), horizon) - first;
  return grid.head(keep);
}

ReplicateBatch replicate_sups(const MultiGroupDataset& data, const ReplicateFunctional& functional,
                              std::size_t replicates, std::uint64_t seed, double horizon, std::uint64_t stream,
                              std::size_t workers) {
  std::vector<const GroupSample*> groups;
  for (const auto& g : data.groups()) groups.push_back(&g);
  const ZhatSampler sampler(groups, truncate_grid(pooled_event_grid(data), horizon));
  return replicate_sups(sampler, functional, replicates, seed, stream, workers);
}

double sup_quantile(const ReplicateBatch& batch, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (batch.sups.empty()) throw PreconditionError("sup_quantile: empty batch");
  std::vector<double> sorted = batch.sups;
  std::sort(sorted.begin(), sorted.end());
  const double b = static_cast<double>(sorted.size());
  // The 1e-9 guards against (1 - alpha) * B landing a rounding step above an integer.
  auto rank = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

}  // namespace ordcif
