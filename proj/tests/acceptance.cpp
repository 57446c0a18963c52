// Acceptance gate. `acceptance` runs every criterion; `acceptance N ...` runs
// the listed ones. Prints one PASS/FAIL line per criterion and exits nonzero
// if any failed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "ordcif/ordcif.hpp"

using namespace ordcif;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Random isotonic problems with k <= 8 and weights in [0.1, 10].
struct ProblemStream {
  std::mt19937_64 rng;
  std::uniform_int_distribution<int> k{1, 8};
  std::uniform_real_distribution<double> x{-1.0, 1.0}, w{0.1, 10.0};
  explicit ProblemStream(std::uint64_t seed) : rng(seed) {}
  Eigen::VectorXd values(int n) {
    Eigen::VectorXd v(n);
    for (auto& e : v) e = x(rng);
    return v;
  }
  Eigen::VectorXd weights(int n) {
    Eigen::VectorXd v(n);
    for (auto& e : v) e = w(rng);
    return v;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome isotonic_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemStream ps(1);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int k = ps.k(ps.rng);
    const Eigen::VectorXd x = ps.values(k), w = ps.weights(k);
    worst = std::max(worst, (isoreg_weighted(x, w) - isoreg_maxmin(x, w)).cwiseAbs().maxCoeff());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 1.0, fmt("max |PAVA - maxmin| = %.3g over 1000 problems in %.3f s", worst, secs)};
}

Outcome error_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemStream ps(2);
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int k = ps.k(ps.rng);
    const Eigen::VectorXd x = ps.values(k), w = ps.weights(k);
    Eigen::VectorXd theta = ps.values(k);
    std::sort(theta.data(), theta.data() + k);
    if ((isoreg_weighted(x, w) - theta).cwiseAbs().maxCoeff() > (x - theta).cwiseAbs().maxCoeff()) ++violations;
  }
  const double secs = seconds_since(t0);
  return {violations == 0 && secs < 1.0, fmt("%d violations in 1000 pairs, %.3f s", violations, secs)};
}

Outcome uncensored_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> n_dist(1, 300);
  std::uniform_real_distribution<double> r1(0.1, 3.0), r2(0.0, 3.0);
  std::uniform_int_distribution<int> coarse(0, 1);
  int mismatches = 0;
  long points = 0;
  for (int rep = 0; rep < 500; ++rep) {
    GroupSample g = gen_competing(static_cast<std::size_t>(n_dist(rng)), r1(rng), r2(rng), 0.0, rng());
    // Half the samples are rounded to force ties.
    if (coarse(rng))
      for (auto& r : g.records) r.time = std::ceil(r.time * 10.0) / 10.0;
    const Eigen::VectorXd grid = event_grid(g);
    for (Cause c : {Cause::Primary, Cause::Other}) {
      const Eigen::VectorXd a = empirical_cif(g, c).f_hat.on_grid(grid);
      const Eigen::VectorXd b = cif_censored(g, c).f_hat.on_grid(grid);
      mismatches += static_cast<int>((a.array() != b.array()).count());
      points += grid.size();
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 5.0,
          fmt("%d inexact values among %ld grid evaluations, %.3f s", mismatches, points, secs)};
}

Outcome analytic_tail() {
  ScenarioSpec spec;
  spec.groups.assign(2, GroupScenario{500, 0.95, 0.05, 0.0});
  spec.seed = 4;
  const std::size_t reps = 2000;
  std::vector<char> hit(reps);
  parallel_for(reps, [&](std::size_t r) { hit[r] = sequential_stats(gen_dataset(spec, r)).statistic >= 1.2239; });
  const double rate = static_cast<double>(std::count(hit.begin(), hit.end(), 1)) / reps;
  const double se = std::sqrt(rate * (1 - rate) / reps);
  return {rate >= 0.02 && rate <= 0.055, fmt("P(T_n >= 1.2239) = %.4f (MC s.e. %.4f) over %zu null datasets", rate,
                                             se, reps)};
}

Outcome covariance_matching() {
  ScenarioSpec spec;
  spec.study = Study::CovMatch;
  spec.groups.assign(2, GroupScenario{300, 1.0, 1.0, 2.0 / 3.0});
  spec.replications = 1;
  spec.replicates = 5000;
  spec.seed = 5;
  const StudyReport report = run_study(spec);
  int pairs = 0, within = 0;
  double worst = 0.0;
  for (const auto& c : report.cells) {
    if (c.metric != "covariance_within_tolerance") continue;
    ++pairs;
    within += c.value == 1.0;
    const double mc = report.cell("covariance_mc", c.params).value;
    const double plug = report.cell("covariance_plugin", c.params).value;
    worst = std::max(worst, std::abs(mc - plug) / std::max(0.1 * std::abs(plug), 0.01));
  }
  return {pairs == 10 && within == pairs,
          fmt("%d of %d (s,t) pairs within max(10%% rel, 0.01 abs); worst discrepancy %.2f of tolerance", within,
              pairs, worst)};
}

Outcome mouse_fixture() {
  std::ifstream in(ORDCIF_DATA_DIR "/hoel.csv");
  if (!in) return {false, "fixture data/hoel.csv missing"};
  const MultiGroupDataset data = ingest_csv(in, {"germfree", "conventional"});
  TestOptions opts;
  opts.replicates = 10000;
  opts.seed = 1;
  const SequentialTestReport r = ordered_test(data, opts);
  const bool stat_ok = std::abs(r.statistic - 1.11) <= 0.005;
  const bool p_ok = std::abs(*r.p_value - 0.676) <= 0.02;
  return {stat_ok && p_ok, fmt("n = %zu/%zu, statistic %.4f (target 1.11 +/- 0.005), p %.4f (target 0.676 +/- 0.02)",
                               data.group(0).size(), data.group(1).size(), r.statistic, *r.p_value)};
}

Outcome amse_improvement() {
  ScenarioSpec spec;
  spec.study = Study::Mse;
  spec.groups.assign(2, GroupScenario{200, 1.0, 1.0, 0.0});
  spec.replications = 2000;
  spec.probe_fractions = {0.5};
  spec.seed = 7;
  const StudyReport report = run_study(spec);
  bool pass = true;
  std::string detail;
  for (const char* g : {"1", "2"}) {
    const std::map<std::string, std::string> at{{"group", g}};
    const double ratio = report.cell("mse_ratio", at).value;
    const auto& diff = report.cell("mse_difference", at);
    pass = pass && ratio < 1.0 && diff.value > 2.0 * *diff.se;
    detail += fmt("group %s: ratio %.4f, difference %.3g (%.1f s.e.)  ", g, ratio, diff.value, diff.value / *diff.se);
  }
  return {pass, detail};
}

Outcome band_coverage() {
  ScenarioSpec spec;
  spec.study = Study::Coverage;
  spec.groups.assign(2, GroupScenario{200, 1.0, 1.0, 2.0 / 3.0});
  spec.replications = 1000;
  spec.replicates = 1000;
  spec.alpha = 0.05;
  spec.seed = 8;
  const StudyReport report = run_study(spec);
  const auto& u = report.cell("coverage", {{"center", "unrestricted"}});
  const auto& r = report.cell("coverage", {{"center", "restricted"}});
  return {u.value >= 0.92 && u.value <= 0.97,
          fmt("coverage %.4f (s.e. %.4f); restricted centering %.4f", u.value, *u.se, r.value)};
}

Outcome determinism() {
  std::ifstream in(ORDCIF_DATA_DIR "/hoel.csv");
  if (!in) return {false, "fixture data/hoel.csv missing"};
  const MultiGroupDataset data = ingest_csv(in, {"germfree", "conventional"});

  ScenarioSpec sim;
  sim.study = Study::Coverage;
  sim.groups.assign(2, GroupScenario{80, 1.0, 1.0, 0.5});
  sim.replications = 40;
  sim.replicates = 200;

  auto pipelines = [&](std::size_t workers) {
    TestOptions t;
    t.replicates = 2000;
    t.workers = workers;
    BandOptions b;
    b.replicates = 1000;
    b.center = BandCenter::Restricted;
    b.workers = workers;
    return to_json(ordered_test(data, t)).dump() + to_json(compute_band(data, 0, b)).dump() +
           to_json(run_study(sim, workers)).dump();
  };
  const std::string reference = pipelines(1);
  int mismatches = 0;
  for (std::size_t w : {1u, 2u, 5u, 8u}) mismatches += pipelines(w) != reference;
  return {mismatches == 0, fmt("test, band and simulate outputs compared at 1, 2, 5, 8 workers: %d mismatches",
                               mismatches)};
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria{
    {1, {"isotonic oracle equivalence", isotonic_oracle}},
    {2, {"error-reduction invariant", error_reduction}},
    {3, {"uncensored reduction", uncensored_reduction}},
    {4, {"analytic tail", analytic_tail}},
    {5, {"covariance matching", covariance_matching}},
    {6, {"mouse fixture", mouse_fixture}},
    {7, {"AMSE improvement", amse_improvement}},
    {8, {"band coverage", band_coverage}},
    {9, {"determinism", determinism}},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  if (which.empty())
    for (const auto& [id, _] : kCriteria) which.push_back(id);

  int failed = 0;
  for (int id : which) {
    const auto it = kCriteria.find(id);
    if (it == kCriteria.end()) {
      std::printf("criterion %d: FAIL unknown criterion\n", id);
      ++failed;
      continue;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s  %s\n", id, it->second.first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
