#include "ordcif/json_io.hpp"

#include <charconv>
#include <ostream>

#include "ordcif/errors.hpp"

namespace ordcif {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json to_json(const StepFunction& f) {
  json steps = json::array();
  for (Eigen::Index i = 0; i < f.size(); ++i) steps.push_back({{"t", f.knots()[i]}, {"value", f.values()[i]}});
  return json{{"initial_value", f.initial_value()}, {"steps", std::move(steps)}};
}

StepFunction step_function_from_json(const json& j) {
  const auto& steps = j.at("steps");
  Eigen::VectorXd knots(static_cast<Eigen::Index>(steps.size())), values(static_cast<Eigen::Index>(steps.size()));
  Eigen::Index i = 0;
  for (const auto& s : steps) {
    knots[i] = s.at("t").get<double>();
    values[i] = s.at("value").get<double>();
    ++i;
  }
  return StepFunction(knots, values, j.at("initial_value").get<double>());
}

json to_json(const CifEstimate& e) {
  return json{{"group", e.group_label},
              {"cause", static_cast<int>(e.cause)},
              {"n", e.n},
              {"restricted", false},
              {"function", to_json(e.f_hat)}};
}

json to_json(const SurvivalEstimate& e) {
  return json{{"group", e.group_label}, {"function", to_json(e.s_hat)}};
}

json to_json(const HazardEstimate& e) {
  return json{{"group", e.group_label}, {"cause", static_cast<int>(e.cause)}, {"function", to_json(e.lambda_hat)}};
}

json to_json(const RestrictedCifSet& set) {
  json groups = json::array();
  for (const auto& e : set.estimates) {
    json g = to_json(e);
    g["restricted"] = true;
    groups.push_back(std::move(g));
  }
  json weights = json::array();
  for (Eigen::Index i = 0; i < set.weights.size(); ++i) weights.push_back(set.weights[i]);
  return json{{"restricted", true}, {"weights", std::move(weights)}, {"groups", std::move(groups)}};
}

json to_json(const SequentialTestReport& report) {
  json pairs = json::array();
  for (const auto& p : report.pairs) {
    json item{{"j", p.j}, {"group", p.group_label}, {"sup", p.sup}, {"argsup", p.argsup}};
    item["p_value"] = p.p_value ? json(*p.p_value) : json(nullptr);
    item["process"] = to_json(p.process);
    pairs.push_back(std::move(item));
  }
  json overall{{"T_n", report.statistic},
               {"p", report.p_value ? json(*report.p_value) : json(nullptr)},
               {"method", to_string(report.method)},
               {"horizon", report.horizon},
               {"censored", report.censored}};
  if (report.p_product) overall["p_product"] = *report.p_product;
  if (report.p_bonferroni) overall["p_bonferroni"] = *report.p_bonferroni;
  overall["B"] = report.replicates ? json(report.replicates) : json(nullptr);
  overall["seed"] = report.seed ? json(*report.seed) : json(nullptr);
  return json{{"groups", report.group_labels},
              {"overall", std::move(overall)},
              {"pairs", std::move(pairs)},
              {"warnings", report.warnings}};
}

json to_json(const ReplicateBatch& batch) {
  return json{{"B", batch.replicates}, {"seed", batch.seed}, {"stream", batch.stream}, {"sups", batch.sups}};
}

json to_json(const BandResult& band) {
  return json{{"group", band.group_label},
              {"interval", {band.t1, band.t2}},
              {"alpha", band.alpha},
              {"q_alpha", band.q_alpha},
              {"transform", band.transform},
              {"weight", to_string(band.weight)},
              {"center", to_string(band.center)},
              {"B", band.replicates},
              {"seed", band.seed},
              {"n", band.n},
              {"lower", to_json(band.lower)},
              {"estimate", to_json(band.estimate)},
              {"upper", to_json(band.upper)}};
}

json to_json(const ScenarioSpec& spec) {
  json groups = json::array();
  for (const auto& g : spec.groups)
    groups.push_back({{"n", g.n}, {"rate1", g.rate1}, {"rate2", g.rate2}, {"censor_rate", g.censor_rate}});
  json j{{"study", to_string(spec.study)},
         {"k", spec.k()},
         {"groups", std::move(groups)},
         {"replications", spec.replications},
         {"seed", spec.seed},
         {"alpha", spec.alpha},
         {"replicates", spec.replicates},
         {"force_resampling", spec.force_resampling},
         {"probe_fractions", spec.probe_fractions},
         {"band_group", spec.band_group},
         {"transform", spec.transform},
         {"weight", spec.weight},
         {"covariance_quantiles", spec.covariance_quantiles}};
  j["band_interval"] = spec.band_interval ? json{spec.band_interval->first, spec.band_interval->second} : json(nullptr);
  return j;
}

ScenarioSpec scenario_from_json(const json& j) {
  try {
    ScenarioSpec s;
    s.study = parse_study(j.at("study").get<std::string>());
    for (const auto& g : j.at("groups")) {
      GroupScenario gs;
      gs.n = g.at("n").get<std::size_t>();
      gs.rate1 = g.at("rate1").get<double>();
      gs.rate2 = g.at("rate2").get<double>();
      gs.censor_rate = g.value("censor_rate", 0.0);
      s.groups.push_back(gs);
    }
    if (j.contains("k")) {
      const auto k = j.at("k").get<std::size_t>();
      if (s.groups.size() == 1 && k > 1) s.groups.assign(k, s.groups.front());
      if (s.groups.size() != k) throw ConfigError("'k' does not match the number of groups");
    }
    s.replications = j.value("replications", s.replications);
    s.seed = j.value("seed", s.seed);
    s.alpha = j.value("alpha", s.alpha);
    s.replicates = j.value("replicates", s.replicates);
    s.force_resampling = j.value("force_resampling", s.force_resampling);
    s.probe_fractions = j.value("probe_fractions", s.probe_fractions);
    s.band_group = j.value("band_group", s.band_group);
    s.transform = j.value("transform", s.transform);
    s.weight = j.value("weight", s.weight);
    s.covariance_quantiles = j.value("covariance_quantiles", s.covariance_quantiles);
    if (j.contains("band_interval") && !j.at("band_interval").is_null()) {
      const auto& iv = j.at("band_interval");
      s.band_interval = std::make_pair(iv.at(0).get<double>(), iv.at(1).get<double>());
    }
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
}

json to_json(const StudyReport& report) {
  json cells = json::array();
  for (const auto& c : report.cells) {
    json item{{"metric", c.metric}, {"params", c.params}, {"value", c.value}};
    item["se"] = c.se ? json(*c.se) : json(nullptr);
    cells.push_back(std::move(item));
  }
  return json{{"study", to_string(report.spec.study)}, {"scenario", to_json(report.spec)}, {"cells", std::move(cells)}};
}

void write_study_csv(std::ostream& out, const StudyReport& report) {
  out << "study,metric,params,value,se\n";
  for (const auto& c : report.cells) {
    std::string params;
    for (const auto& [k, v] : c.params) {
      if (!params.empty()) params += ';';
      params += k + "=" + v;
    }
    out << to_string(report.spec.study) << ',' << c.metric << ',' << params << ',' << format_double(c.value) << ','
        << (c.se ? format_double(*c.se) : std::string()) << '\n';
  }
}

}  // namespace ordcif
