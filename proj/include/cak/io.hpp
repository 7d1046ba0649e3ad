#pragma once

#include <string>
#include <string_view>

#include "cak/abstraction.hpp"
#include "cak/corpus.hpp"
#include "cak/interventions.hpp"
#include "cak/maps.hpp"
#include "cak/prob.hpp"
#include "cak/report.hpp"
#include "cak/scm.hpp"

namespace cak {

// All readers throw InputError naming the offending field.

Json parse_json_text(std::string_view text, const std::string& what);

// {"exogenous": [{"name", "domain"}], "endogenous": [{"name", "domain",
// "equation"}], "allowed_interventions": "all" | [{...}, ...]}
CausalModel model_from_json(const Json& j);
Json model_to_json(const CausalModel& model);

// {"X1": 1, "X2": 0}
Intervention intervention_from_json(const Json& j);

// [{"context": {...}, "p": "1/3"}, ...]; checked against the model.
RationalDistribution distribution_from_json(const Json& j, const CausalModel& model);
Json distribution_to_json(const CausalModel& model, const RationalDistribution& d);

// [{"from": {...}, "to": {...}}, ...]
InterventionMap intervention_map_from_json(const Json& j);
Json intervention_map_to_json(const InterventionMap& omega);

// {"table": [{"from": {...}, "to": {...}}]} or {"exprs": {"Y": "X1 + X2"}}.
VariableMap variable_map_from_json(const Json& j, const Space& source,
                                   const Space& target, const Limits& limits = {});
Json variable_map_to_json(const VariableMap& map);

// {"cells": {"Y": ["X1", "X2"]}, "marginal": [...]}; cells are put in the
// high model's declaration order.
Partition partition_from_json(const Json& j, const CausalModel& high);

// Everything in a bundle, with the expected verdicts.
Json bundle_to_json(const ExampleBundle& bundle);

}  // namespace cak
