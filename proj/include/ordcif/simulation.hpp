#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ordcif/bands.hpp"
#include "ordcif/data.hpp"

namespace ordcif {

// Constant cause-specific hazards for one group, plus independent
// exponential censoring (rate 0 means no censoring).
struct GroupScenario {
  std::size_t n = 100;
  double rate1 = 1.0;
  double rate2 = 1.0;
  double censor_rate = 0.0;

  // F_1(t) = rate1/(rate1+rate2) (1 - exp(-(rate1+rate2) t)).
  double true_cif1(double t) const;
  double true_cif2(double t) const;
  // Time at which F_1 reaches the fraction `p` of its total mass.
  double cif1_quantile(double p) const;
  // p-quantile of the observed time min(T, C).
  double observed_quantile(double p) const;
};

enum class Study { Size, Power, Mse, Coverage, CovMatch };

std::string to_string(Study s);
Study parse_study(const std::string& name);

struct ScenarioSpec {
  Study study = Study::Size;
  std::vector<GroupScenario> groups;
  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  double alpha = 0.05;
  // Multiplier replicates per dataset (resampled tests, bands, covmatch).
  std::size_t replicates = 1000;
  bool force_resampling = false;
  // mse: probe times at these fractions of group 1's total cause-1 mass.
  std::vector<double> probe_fractions{0.25, 0.5, 0.75};
  // coverage
  std::size_t band_group = 0;
  std::optional<std::pair<double, double>> band_interval;
  std::string transform = "identity";
  std::string weight = "unit";
  // covmatch: probe times at these quantiles of the observed time of the band group.
  std::vector<double> covariance_quantiles{0.15, 0.35, 0.55, 0.75};

  std::size_t k() const noexcept { return groups.size(); }
  void validate() const;
};

struct StudyCell {
  std::string metric;
  std::map<std::string, std::string> params;
  double value = 0.0;
  std::optional<double> se;
};

struct StudyReport {
  ScenarioSpec spec;
  std::vector<StudyCell> cells;

  // First cell with this metric whose params include all of `match`.
  const StudyCell& cell(const std::string& metric, const std::map<std::string, std::string>& match = {}) const;
};

// A study replicate failed; what() names the replicate and the inner error.
class ReplicateError : public std::runtime_error {
 public:
  ReplicateError(std::size_t index, const std::string& inner)
      : std::runtime_error("replicate " + std::to_string(index) + ": " + inner), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

GroupSample gen_competing(std::size_t n, double rate1, double rate2, double censor_rate, std::uint64_t seed,
                          std::string label = "g");

// Dataset for study replicate r; group i draws from sub_seed(seed, r, i).
MultiGroupDataset gen_dataset(const ScenarioSpec& spec, std::size_t replicate);

StudyReport run_study(const ScenarioSpec& spec, std::size_t workers = 0);

// Two-sided analytic tail 2 sum_{m>=1} (-1)^{m-1} exp(-2 m^2 x^2), the
// comparison test of the power study.
double kolmogorov_tail(double x);

}  // namespace ordcif
