#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cak/intervention.hpp"
#include "cak/maps.hpp"
#include "cak/scm.hpp"
#include "json.hpp"

namespace cak {

using Json = nlohmann::ordered_json;

// Outcome of a transformation or abstraction check.
struct CheckReport {
  bool holds = false;
  // Short name of the condition that decided a negative verdict; empty when
  // the check holds.
  std::string condition;
  std::string summary;
  Json witness;         // null when absent
  Json counterexample;  // null when absent
  // The compatible context map, when one was found.
  std::optional<ContextMap> tau_u;
};

// {"X1": 0, "X2": 1}
Json assignment_json(const Space& space, std::span<const Value> values);
Json intervention_json(const Intervention& i);
Json interventions_json(const std::vector<Intervention>& list);
// [{"from": {...}, "to": {...}}, ...]
Json map_table_json(const VariableMap& map);

}  // namespace cak
