#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace ordcif {

// Cause codes: 0 censored, 1 cause of interest, 2 all other causes.
enum class Cause : int { Censored = 0, Primary = 1, Other = 2 };

struct FailureRecord {
  double time = 0.0;
  Cause cause = Cause::Censored;

  bool failed() const noexcept { return cause != Cause::Censored; }
  friend bool operator==(const FailureRecord&, const FailureRecord&) = default;
};

// Throws DataError unless time > 0 and finite.
FailureRecord make_record(double time, int cause);

struct GroupSample {
  std::string label;
  std::vector<FailureRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  bool censored() const noexcept;
  std::size_t count(Cause c) const noexcept;
  double max_time() const;
};

/**
 * k >= 2 independent group samples. Position i is the hypothesized rank of
 * group i under the ordered alternative F_1 <= F_2 <= ... <= F_k; the order is
 * always supplied by the caller.
 */
class MultiGroupDataset {
 public:
  explicit MultiGroupDataset(std::vector<GroupSample> groups);

  const std::vector<GroupSample>& groups() const noexcept { return groups_; }
  const GroupSample& group(std::size_t i) const { return groups_.at(i); }
  std::size_t k() const noexcept { return groups_.size(); }
  std::size_t total_size() const noexcept { return n_; }
  bool censored() const noexcept { return censored_; }

  // n_i as doubles, for use as isotonic weights.
  Eigen::VectorXd sizes() const;
  // gamma_i = n_i / n.
  Eigen::VectorXd proportions() const;
  // Smallest per-group largest observed time; the default test horizon.
  double common_horizon() const;
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<GroupSample> groups_;
  std::size_t n_ = 0;
  bool censored_ = false;
};

// Reads `group,time,cause` CSV. Groups are arranged in `order`; rows keep their
// input order within a group. Throws DataError naming the offending line.
MultiGroupDataset ingest_csv(std::istream& in, const std::vector<std::string>& order);

void write_csv(std::ostream& out, const MultiGroupDataset& data);

// Distinct observed times across all groups and cause codes, ascending.
Eigen::VectorXd pooled_event_grid(const MultiGroupDataset& data);

// Distinct observed times of one group, ascending.
Eigen::VectorXd event_grid(const GroupSample& group);

}  // namespace ordcif
