#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>

#include "ordcif/bands.hpp"
#include "ordcif/estimators.hpp"
#include "ordcif/isotonic.hpp"
#include "ordcif/ordered_test.hpp"
#include "ordcif/resampling.hpp"
#include "ordcif/simulation.hpp"
#include "ordcif/step_function.hpp"

namespace ordcif {

using json = nlohmann::ordered_json;

// {"initial_value": v0, "steps": [{"t": ..., "value": ...}, ...]}
json to_json(const StepFunction& f);
StepFunction step_function_from_json(const json& j);

json to_json(const CifEstimate& e);
json to_json(const SurvivalEstimate& e);
json to_json(const HazardEstimate& e);
json to_json(const RestrictedCifSet& set);
json to_json(const SequentialTestReport& report);
json to_json(const ReplicateBatch& batch);
json to_json(const BandResult& band);
json to_json(const ScenarioSpec& spec);
json to_json(const StudyReport& report);

ScenarioSpec scenario_from_json(const json& j);

// Flat `study,metric,params,value,se` rows.
void write_study_csv(std::ostream& out, const StudyReport& report);

// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace ordcif
