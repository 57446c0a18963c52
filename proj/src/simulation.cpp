#include "ordcif/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ordcif/errors.hpp"
#include "ordcif/estimators.hpp"
#include "ordcif/isotonic.hpp"
#include "ordcif/ordered_test.hpp"
#include "ordcif/parallel.hpp"
#include "ordcif/resampling.hpp"
#include "ordcif/rng.hpp"

namespace ordcif {

double GroupScenario::true_cif1(double t) const {
  const double total = rate1 + rate2;
  return t <= 0.0 ? 0.0 : rate1 / total * -std::expm1(-total * t);
}

double GroupScenario::true_cif2(double t) const {
  const double total = rate1 + rate2;
  return t <= 0.0 ? 0.0 : rate2 / total * -std::expm1(-total * t);
}

double GroupScenario::cif1_quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("CIF quantile fraction must lie in (0, 1)");
  return -std::log1p(-p) / (rate1 + rate2);
}

double GroupScenario::observed_quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError("observed-time quantile must lie in (0, 1)");
  return -std::log1p(-p) / (rate1 + rate2 + censor_rate);
}

std::string to_string(Study s) {
  switch (s) {
    case Study::Size: return "size";
    case Study::Power: return "power";
    case Study::Mse: return "mse";
    case Study::Coverage: return "coverage";
    case Study::CovMatch: return "covmatch";
  }
  return "size";
}

Study parse_study(const std::string& name) {
  if (name == "size") return Study::Size;
  if (name == "power") return Study::Power;
  if (name == "mse") return Study::Mse;
  if (name == "coverage") return Study::Coverage;
  if (name == "covmatch") return Study::CovMatch;
  throw ConfigError("unknown study '" + name + "' (size, power, mse, coverage, covmatch)");
}

void ScenarioSpec::validate() const {
  if (groups.size() < 2) throw ConfigError("scenario needs at least two groups");
  for (const auto& g : groups) {
    if (g.n < 1) throw ConfigError("group size must be at least 1");
    if (g.rate1 < 0 || g.rate2 < 0 || g.censor_rate < 0) throw ConfigError("hazard rates must be nonnegative");
    if (!(g.rate1 + g.rate2 > 0)) throw ConfigError("rate1 + rate2 must be positive");
  }
  if (replications < 1) throw ConfigError("replications must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (band_group >= groups.size()) throw ConfigError("band_group out of range");
  const bool resampled = force_resampling ||
                         std::any_of(groups.begin(), groups.end(), [](const auto& g) { return g.censor_rate > 0; });
  const bool needs_replicates =
      study == Study::Coverage || study == Study::CovMatch ||
      ((study == Study::Size || study == Study::Power) && resampled);
  if (needs_replicates && replicates < kMinReplicates)
    throw ConfigError("at least " + std::to_string(kMinReplicates) + " multiplier replicates are required");
  for (double p : probe_fractions)
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("probe fractions must lie in (0, 1)");
  for (double p : covariance_quantiles)
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("covariance quantiles must lie in (0, 1)");
  parse_transform(transform);
  parse_weight(weight);
}

const StudyCell& StudyReport::cell(const std::string& metric, const std::map<std::string, std::string>& match) const {
  for (const auto& c : cells) {
    if (c.metric != metric) continue;
    bool ok = true;
    for (const auto& [key, value] : match) {
      const auto it = c.params.find(key);
      ok = ok && it != c.params.end() && it->second == value;
    }
    if (ok) return c;
  }
  throw std::out_of_range("study report has no cell '" + metric + "'");
}

GroupSample gen_competing(std::size_t n, double rate1, double rate2, double censor_rate, std::uint64_t seed,
                          std::string label) {
  if (!(rate1 >= 0 && rate2 >= 0 && censor_rate >= 0)) throw ConfigError("hazard rates must be nonnegative");
  if (!(rate1 + rate2 > 0)) throw ConfigError("rate1 + rate2 must be positive");
  CounterRng rng(seed);
  const double total = rate1 + rate2;
  const double p1 = rate1 / total;
  GroupSample g{std::move(label), {}};
  g.records.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = rng.exponential(total);
    const Cause cause = rng.uniform() < p1 ? Cause::Primary : Cause::Other;
    const double c = rng.exponential(censor_rate);
    g.records.push_back(c < t ? FailureRecord{c, Cause::Censored} : FailureRecord{t, cause});
  }
  return g;
}

MultiGroupDataset gen_dataset(const ScenarioSpec& spec, std::size_t replicate) {
  std::vector<GroupSample> groups;
  for (std::size_t i = 0; i < spec.groups.size(); ++i) {
    const auto& s = spec.groups[i];
    groups.push_back(gen_competing(s.n, s.rate1, s.rate2, s.censor_rate, sub_seed(spec.seed, replicate, i),
                                   "g" + std::to_string(i + 1)));
  }
  return MultiGroupDataset(std::move(groups));
}

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  double sum = 0.0;
  for (int m = 1; m <= 100; ++m) {
    const double term = std::exp(-2.0 * m * m * x * x);
    sum += (m % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

// Seed for everything a replicate does beyond generating its data.
std::uint64_t inner_seed(const ScenarioSpec& spec, std::size_t r) {
  return sub_seed(spec.seed, r, std::uint64_t{1} << 40);
}

template <typename Body>
void for_each_replicate(std::size_t count, std::size_t workers, Body&& body) {
  parallel_for(
      count,
      [&](std::size_t r) {
        try {
          body(r);
        } catch (const std::exception& e) {
          throw ReplicateError(r, e.what());
        }
      },
      workers);
}

StudyCell rate_cell(const std::string& metric, const std::vector<char>& hits,
                    std::map<std::string, std::string> params = {}) {
  const double r = static_cast<double>(hits.size());
  const double p = static_cast<double>(std::count(hits.begin(), hits.end(), 1)) / r;
  return StudyCell{metric, std::move(params), p, std::sqrt(p * (1.0 - p) / r)};
}

// Two-sided counterpart of the sequential statistic, uncensored only.
double two_sided_pvalue(const SequentialTestReport& report, std::size_t k) {
  double x = 0.0;
  for (const auto& pair : report.pairs) {
    const auto& v = pair.process.values();
    if (v.size()) x = std::max(x, v.cwiseAbs().maxCoeff());
  }
  const double tail = kolmogorov_tail(x);
  return -std::expm1(static_cast<double>(k - 1) * std::log1p(-std::min(tail, 1.0 - 1e-300)));
}

void run_rejection_study(const ScenarioSpec& spec, std::size_t workers, StudyReport& report) {
  const std::size_t r_count = spec.replications;
  std::vector<char> ordered(r_count, 0), two_sided(r_count, 0);
  std::vector<double> stats(r_count, 0.0);
  bool any_censored = false;
  std::vector<char> censored(r_count, 0);

  for_each_replicate(r_count, workers, [&](std::size_t r) {
    const MultiGroupDataset data = gen_dataset(spec, r);
    censored[r] = data.censored();
    TestOptions opts;
    opts.replicates = spec.replicates;
    opts.seed = inner_seed(spec, r);
    opts.force_resampling = spec.force_resampling;
    opts.workers = 1;
    const SequentialTestReport rep = ordered_test(data, opts);
    stats[r] = rep.statistic;
    ordered[r] = *rep.p_value <= spec.alpha;
    if (!data.censored()) two_sided[r] = two_sided_pvalue(rep, data.k()) <= spec.alpha;
  });
  any_censored = std::count(censored.begin(), censored.end(), 1) > 0;

  report.cells.push_back(rate_cell("ordered_rejection_rate", ordered, {{"alpha", fmt(spec.alpha)}}));
  if (!any_censored && !spec.force_resampling)
    report.cells.push_back(rate_cell("two_sided_rejection_rate", two_sided, {{"alpha", fmt(spec.alpha)}}));

  double mean = 0.0;
  for (double s : stats) mean += s;
  mean /= static_cast<double>(r_count);
  double var = 0.0;
  for (double s : stats) var += (s - mean) * (s - mean);
  var /= std::max<double>(1.0, static_cast<double>(r_count) - 1.0);
  report.cells.push_back(
      StudyCell{"mean_statistic", {}, mean, std::sqrt(var / static_cast<double>(r_count))});
}

void run_mse_study(const ScenarioSpec& spec, std::size_t workers, StudyReport& report) {
  const std::size_t r_count = spec.replications;
  const std::size_t k = spec.k();
  const std::size_t probes = spec.probe_fractions.size();
  std::vector<double> times;
  for (double p : spec.probe_fractions) times.push_back(spec.groups[0].cif1_quantile(p));

  // err[r][(i * probes + p) * 2 + {0 unrestricted, 1 restricted}]
  std::vector<std::vector<double>> err(r_count, std::vector<double>(k * probes * 2));
  for_each_replicate(r_count, workers, [&](std::size_t r) {
    const MultiGroupDataset data = gen_dataset(spec, r);
    std::vector<CifEstimate> est;
    for (const auto& g : data.groups()) est.push_back(estimate_cif(g, Cause::Primary));
    const RestrictedCifSet restricted = restrict_cifs(est, data.sizes(), pooled_event_grid(data));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t p = 0; p < probes; ++p) {
        const double truth = spec.groups[i].true_cif1(times[p]);
        const double u = est[i](times[p]) - truth;
        const double s = restricted.estimates[i](times[p]) - truth;
        err[r][(i * probes + p) * 2] = u * u;
        err[r][(i * probes + p) * 2 + 1] = s * s;
      }
    }
  });

  const double rc = static_cast<double>(r_count);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t p = 0; p < probes; ++p) {
      double mu = 0, ms = 0;
      for (std::size_t r = 0; r < r_count; ++r) {
        mu += err[r][(i * probes + p) * 2];
        ms += err[r][(i * probes + p) * 2 + 1];
      }
      mu /= rc;
      ms /= rc;
      double var_u = 0, var_s = 0, var_d = 0;
      for (std::size_t r = 0; r < r_count; ++r) {
        const double a = err[r][(i * probes + p) * 2] - mu;
        const double b = err[r][(i * probes + p) * 2 + 1] - ms;
        var_u += a * a;
        var_s += b * b;
        var_d += (a - b) * (a - b);
      }
      const double denom = std::max(1.0, rc - 1.0);
      const std::map<std::string, std::string> params{
          {"group", std::to_string(i + 1)}, {"fraction", fmt(spec.probe_fractions[p])}, {"time", fmt(times[p])}};
      report.cells.push_back(StudyCell{"mse_unrestricted", params, mu, std::sqrt(var_u / denom / rc)});
      report.cells.push_back(StudyCell{"mse_restricted", params, ms, std::sqrt(var_s / denom / rc)});
      report.cells.push_back(StudyCell{"mse_difference", params, mu - ms, std::sqrt(var_d / denom / rc)});
      report.cells.push_back(StudyCell{"mse_ratio", params, mu > 0 ? ms / mu : 1.0, std::nullopt});
    }
  }
}

// True CIF inside [lower, upper] everywhere on [t1, t2]. The band is constant
// between breakpoints while the truth increases, so each piece is checked at
// its left end against the lower limit and at its right end against the upper.
bool band_covers(const BandResult& band, const GroupScenario& truth) {
  const auto& pts = band.points;
  for (Eigen::Index m = 0; m < pts.size(); ++m) {
    const double left = pts[m];
    const double right = m + 1 < pts.size() ? pts[m + 1] : band.t2;
    if (band.lower.values()[m] > truth.true_cif1(left)) return false;
    if (band.upper.values()[m] < truth.true_cif1(right)) return false;
  }
  return true;
}

void run_coverage_study(const ScenarioSpec& spec, std::size_t workers, StudyReport& report) {
  const std::size_t r_count = spec.replications;
  const GroupScenario& truth = spec.groups[spec.band_group];
  const auto interval = spec.band_interval.value_or(
      std::make_pair(truth.cif1_quantile(0.1), truth.observed_quantile(0.8)));

  std::vector<char> unrestricted(r_count, 0), restricted(r_count, 0);
  std::vector<double> q(r_count, 0.0);
  for_each_replicate(r_count, workers, [&](std::size_t r) {
    const MultiGroupDataset data = gen_dataset(spec, r);
    BandOptions opts;
    opts.alpha = spec.alpha;
    opts.interval = interval;
    opts.transform = parse_transform(spec.transform);
    opts.weight = parse_weight(spec.weight);
    opts.replicates = spec.replicates;
    opts.seed = inner_seed(spec, r);
    opts.workers = 1;
    const BandResult band = compute_band(data, spec.band_group, opts);
    unrestricted[r] = band_covers(band, truth);
    q[r] = band.q_alpha;

    std::vector<CifEstimate> est;
    for (const auto& g : data.groups()) est.push_back(cif_censored(g, Cause::Primary));
    const RestrictedCifSet rset = restrict_cifs(est, data.sizes(), pooled_event_grid(data));
    restricted[r] = band_covers(recenter_band(band, rset.estimates[spec.band_group].f_hat, BandCenter::Restricted),
                                truth);
  });

  const std::map<std::string, std::string> params{{"alpha", fmt(spec.alpha)},
                                                  {"t1", fmt(interval.first)},
                                                  {"t2", fmt(interval.second)},
                                                  {"group", std::to_string(spec.band_group + 1)}};
  auto with_center = [&](const std::string& c) {
    auto p = params;
    p["center"] = c;
    return p;
  };
  report.cells.push_back(rate_cell("coverage", unrestricted, with_center("unrestricted")));
  report.cells.push_back(rate_cell("coverage", restricted, with_center("restricted")));
  double mean_q = 0.0;
  for (double v : q) mean_q += v;
  report.cells.push_back(StudyCell{"mean_q_alpha", params, mean_q / static_cast<double>(r_count), std::nullopt});
}

void run_covmatch_study(const ScenarioSpec& spec, std::size_t workers, StudyReport& report) {
  const std::size_t group = spec.band_group;
  const GroupScenario& scenario = spec.groups[group];
  std::vector<double> probe;
  for (double p : spec.covariance_quantiles) probe.push_back(scenario.observed_quantile(p));
  std::sort(probe.begin(), probe.end());
  const Eigen::VectorXd points = Eigen::Map<Eigen::VectorXd>(probe.data(), static_cast<Eigen::Index>(probe.size()));

  for (std::size_t r = 0; r < spec.replications; ++r) {
    std::vector<std::vector<double>> rows;
    try {
      const MultiGroupDataset data = gen_dataset(spec, r);
      const GroupSample& g = data.group(group);
      const CovarianceKernel kernel(g);
      const ZhatSampler sampler({&g}, points);
      const auto b = spec.replicates;
      std::vector<Eigen::VectorXd> draws(b);
      parallel_for(
          b,
          [&](std::size_t i) {
            Eigen::MatrixXd z;
            sampler.draw(sub_seed(inner_seed(spec, r), 0, i), z);
            draws[i] = z.row(0).transpose();
          },
          workers);
      const Eigen::Index m = points.size();
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index c = a; c < m; ++c) {
          double mean = 0.0, sq = 0.0;
          for (const auto& d : draws) {
            const double prod = d[a] * d[c];
            mean += prod;
            sq += prod * prod;
          }
          const double bd = static_cast<double>(b);
          mean /= bd;
          const double se = std::sqrt(std::max(0.0, sq / bd - mean * mean) / bd);
          const double plug = kernel(points[a], points[c]);
          const double tol = std::max(0.1 * std::abs(plug), 0.01);
          const std::map<std::string, std::string> params{
              {"replication", std::to_string(r)}, {"s", fmt(points[a])}, {"t", fmt(points[c])}};
          report.cells.push_back(StudyCell{"covariance_mc", params, mean, se});
          report.cells.push_back(StudyCell{"covariance_plugin", params, plug, std::nullopt});
          report.cells.push_back(StudyCell{"covariance_within_tolerance", params,
                                           std::abs(mean - plug) <= tol ? 1.0 : 0.0, std::nullopt});
        }
      }
    } catch (const ReplicateError&) {
      throw;
    } catch (const std::exception& e) {
      throw ReplicateError(r, e.what());
    }
  }
}

}  // namespace

StudyReport run_study(const ScenarioSpec& spec, std::size_t workers) {
  spec.validate();
  StudyReport report{spec, {}};
  switch (spec.study) {
    case Study::Size:
    case Study::Power: run_rejection_study(spec, workers, report); break;
    case Study::Mse: run_mse_study(spec, workers, report); break;
    case Study::Coverage: run_coverage_study(spec, workers, report); break;
    case Study::CovMatch: run_covmatch_study(spec, workers, report); break;
  }
  return report;
}

}  // namespace ordcif
