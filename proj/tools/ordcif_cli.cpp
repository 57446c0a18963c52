// Command-line front end: estimate, test, band, simulate.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 numerical or range error.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ordcif/ordcif.hpp"

namespace {

using ordcif::json;

constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;
  std::string input;
  std::vector<std::string> groups;
  double alpha = 0.05;
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
  std::optional<double> horizon;
  std::string transform = "identity";
  std::string weight = "unit";
  std::string center = "unrestricted";
  std::optional<std::string> band_group;
  std::vector<double> interval;
  bool resample = false;
  std::string config;
  std::string out;
  std::string format = "json";
};

json config_json(const RunConfig& c) {
  json j{{"command", c.command}, {"seed", c.seed}, {"format", c.format}};
  if (c.command != "simulate") {
    j["input"] = c.input;
    j["groups"] = c.groups;
  }
  if (c.command == "test") {
    j["reps"] = c.reps;
    j["resample"] = c.resample;
  }
  if (c.command == "test" || c.command == "estimate" || c.command == "band")
    j["horizon"] = c.horizon ? json(*c.horizon) : json(nullptr);
  if (c.command == "band") {
    j["alpha"] = c.alpha;
    j["reps"] = c.reps;
    j["transform"] = c.transform;
    j["weight"] = c.weight;
    j["center"] = c.center;
    j["group"] = c.band_group ? json(*c.band_group) : json(nullptr);
    j["interval"] = c.interval.empty() ? json(nullptr) : json(c.interval);
  }
  if (c.command == "simulate") j["config"] = c.config;
  return j;
}

ordcif::MultiGroupDataset load(const RunConfig& c) {
  std::ifstream in(c.input);
  if (!in) throw ordcif::DataError("cannot open input file '" + c.input + "'");
  return ordcif::ingest_csv(in, c.groups);
}

json envelope(const RunConfig& c, json result) {
  return json{{"tool", "ordcif"}, {"version", kVersion}, {"config", config_json(c)}, {"result", std::move(result)}};
}

std::string csv_header(const RunConfig& c) {
  return "# ordcif " + std::string(kVersion) + " " + config_json(c).dump() + "\n";
}

void csv_step(std::ostringstream& out, const std::string& prefix, const ordcif::StepFunction& f) {
  out << prefix << ",0," << ordcif::format_double(f.initial_value()) << '\n';
  for (Eigen::Index i = 0; i < f.size(); ++i)
    out << prefix << ',' << ordcif::format_double(f.knots()[i]) << ',' << ordcif::format_double(f.values()[i])
        << '\n';
}

std::string run_estimate(const RunConfig& c) {
  const auto data = load(c);
  const Eigen::VectorXd grid = ordcif::pooled_event_grid(data);
  std::vector<ordcif::CifEstimate> cause1, cause2;
  for (const auto& g : data.groups()) {
    cause1.push_back(ordcif::estimate_cif(g, ordcif::Cause::Primary));
    cause2.push_back(ordcif::estimate_cif(g, ordcif::Cause::Other));
  }
  const auto restricted = ordcif::restrict_cifs(cause1, data.sizes(), grid);

  if (c.format == "csv") {
    std::ostringstream out;
    out << csv_header(c) << "group,estimate,cause,t,value\n";
    for (std::size_t i = 0; i < data.k(); ++i) {
      const auto& label = data.group(i).label;
      csv_step(out, label + ",unrestricted,1", cause1[i].f_hat);
      csv_step(out, label + ",unrestricted,2", cause2[i].f_hat);
      csv_step(out, label + ",restricted,1", restricted.estimates[i].f_hat);
    }
    return out.str();
  }

  json groups = json::array();
  for (std::size_t i = 0; i < data.k(); ++i) {
    json restricted_json = ordcif::to_json(restricted.estimates[i]);
    restricted_json["restricted"] = true;
    groups.push_back(json{{"group", data.group(i).label},
                          {"n", data.group(i).size()},
                          {"unrestricted", ordcif::to_json(cause1[i])},
                          {"unrestricted_cause2", ordcif::to_json(cause2[i])},
                          {"restricted", std::move(restricted_json)}});
  }
  return envelope(c, json{{"censored", data.censored()},
                          {"weights", std::vector<double>(restricted.weights.data(),
                                                          restricted.weights.data() + restricted.weights.size())},
                          {"groups", std::move(groups)}})
             .dump(2) +
         "\n";
}

std::string run_test(const RunConfig& c) {
  const auto data = load(c);
  ordcif::TestOptions opts;
  opts.horizon = c.horizon;
  opts.replicates = c.reps;
  opts.seed = c.seed;
  opts.force_resampling = c.resample;
  const auto report = ordcif::ordered_test(data, opts);

  if (c.format == "csv") {
    std::ostringstream out;
    out << csv_header(c) << "# T_n=" << ordcif::format_double(report.statistic)
        << " p=" << (report.p_value ? ordcif::format_double(*report.p_value) : "NA")
        << " method=" << ordcif::to_string(report.method) << "\n";
    out << "j,group,t,value\n";
    for (const auto& p : report.pairs) csv_step(out, std::to_string(p.j) + "," + p.group_label, p.process);
    return out.str();
  }
  return envelope(c, ordcif::to_json(report)).dump(2) + "\n";
}

std::string run_band(const RunConfig& c) {
  const auto data = load(c);
  ordcif::BandOptions opts;
  opts.alpha = c.alpha;
  opts.transform = ordcif::parse_transform(c.transform);
  opts.weight = ordcif::parse_weight(c.weight);
  opts.center = ordcif::parse_center(c.center);
  opts.replicates = c.reps;
  opts.seed = c.seed;
  if (!c.interval.empty()) {
    if (c.interval.size() != 2) throw ordcif::ConfigError("--interval takes two values t1,t2");
    opts.interval = std::make_pair(c.interval[0], c.interval[1]);
  } else if (c.horizon) {
    if (*c.horizon > data.common_horizon())
      throw ordcif::RangeError("horizon exceeds the last observed time of the shortest group");
  }

  std::vector<std::size_t> which;
  if (c.band_group) {
    which.push_back(data.index_of(*c.band_group));
  } else {
    for (std::size_t i = 0; i < data.k(); ++i) which.push_back(i);
  }

  std::vector<ordcif::BandResult> bands;
  for (std::size_t i : which) {
    auto o = opts;
    if (!o.interval && c.horizon) {
      double first = HUGE_VAL;
      for (const auto& r : data.group(i).records)
        if (r.cause == ordcif::Cause::Primary) first = std::min(first, r.time);
      if (!std::isfinite(first))
        throw ordcif::DomainError("group '" + data.group(i).label + "' has no cause-1 events");
      o.interval = std::make_pair(first, *c.horizon);
    }
    bands.push_back(ordcif::compute_band(data, i, o));
  }

  if (c.format == "csv") {
    std::ostringstream out;
    out << csv_header(c) << "group,t,lower,estimate,upper\n";
    for (const auto& b : bands) {
      for (Eigen::Index m = 0; m < b.points.size(); ++m) {
        out << b.group_label << ',' << ordcif::format_double(b.points[m]) << ','
            << ordcif::format_double(b.lower.values()[m]) << ',' << ordcif::format_double(b.estimate.values()[m])
            << ',' << ordcif::format_double(b.upper.values()[m]) << '\n';
      }
    }
    return out.str();
  }
  json arr = json::array();
  for (const auto& b : bands) arr.push_back(ordcif::to_json(b));
  return envelope(c, json{{"bands", std::move(arr)}}).dump(2) + "\n";
}

std::string run_simulate(const RunConfig& c) {
  std::ifstream in(c.config);
  if (!in) throw ordcif::ConfigError("cannot open scenario file '" + c.config + "'");
  json raw;
  try {
    raw = json::parse(in);
  } catch (const json::exception& e) {
    throw ordcif::ConfigError(std::string("scenario file: ") + e.what());
  }
  auto spec = ordcif::scenario_from_json(raw);
  if (raw.contains("seed") == false) spec.seed = c.seed;
  const auto report = ordcif::run_study(spec);
  if (c.format == "csv") {
    std::ostringstream out;
    out << csv_header(c) << "# scenario " << ordcif::to_json(spec).dump() << "\n";
    ordcif::write_study_csv(out, report);
    return out.str();
  }
  return envelope(c, ordcif::to_json(report)).dump(2) + "\n";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-restricted inference for cause-1 cumulative incidence functions"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  std::string groups_flag;
  std::string horizon_flag;

  auto add_common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) {
      sub->add_option("--input", cfg.input, "CSV with header group,time,cause")->required();
      sub->add_option("--groups", groups_flag, "Hypothesized order, smallest CIF first: g1,g2,...")->required();
    }
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--out", cfg.out, "Output path (default: standard output)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* estimate = app.add_subcommand("estimate", "Unrestricted and order-restricted CIF estimates");
  add_common(estimate, true);
  estimate->add_option("--horizon", horizon_flag, "Accepted for symmetry; estimates are reported on the full grid");

  auto* test = app.add_subcommand("test", "Sequential one-sided test of equal CIFs against the ordering");
  add_common(test, true);
  test->add_option("--reps", cfg.reps, "Multiplier replicates for the resampled p-value");
  test->add_option("--horizon", horizon_flag, "Upper end of the time range (default: shortest group's last time)");
  test->add_flag("--resample", cfg.resample, "Use resampling even for uncensored data");

  auto* band = app.add_subcommand("band", "Simultaneous confidence bands for the cause-1 CIF");
  add_common(band, true);
  band->add_option("--alpha", cfg.alpha, "1 - confidence level");
  band->add_option("--reps", cfg.reps, "Multiplier replicates");
  band->add_option("--horizon", horizon_flag, "Right end of the default interval");
  band->add_option("--interval", cfg.interval, "t1,t2")->delimiter(',')->expected(2);
  band->add_option("--transform", cfg.transform, "identity, log, cloglog or logit");
  band->add_option("--weight", cfg.weight, "unit or inverse-sd");
  band->add_option("--center", cfg.center, "unrestricted or restricted");
  band->add_option("--group", cfg.band_group, "Group label (default: every group)");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo study from a JSON scenario file");
  add_common(simulate, false);
  simulate->add_option("--config", cfg.config, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (!groups_flag.empty()) cfg.groups = split_list(groups_flag);
    if (!horizon_flag.empty()) {
      try {
        std::size_t used = 0;
        cfg.horizon = std::stod(horizon_flag, &used);
        if (used != horizon_flag.size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw ordcif::ConfigError("--horizon must be a number");
      }
    }
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ordcif::ConfigError("--alpha must lie in (0, 1)");

    std::string output;
    if (*estimate) {
      cfg.command = "estimate";
      output = run_estimate(cfg);
    } else if (*test) {
      cfg.command = "test";
      output = run_test(cfg);
    } else if (*band) {
      cfg.command = "band";
      output = run_band(cfg);
    } else {
      cfg.command = "simulate";
      output = run_simulate(cfg);
    }

    if (cfg.out.empty()) {
      std::cout << output;
    } else {
      std::ofstream out(cfg.out, std::ios::binary);
      if (!out) throw ordcif::ConfigError("cannot write '" + cfg.out + "'");
      out << output;
    }
    return 0;
  } catch (const ordcif::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const ordcif::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
