#include "cak/report.hpp"

namespace cak {

Json assignment_json(const Space& space, std::span<const Value> values) {
  Json out = Json::object();
  for (std::size_t k = 0; k < space.arity(); ++k)
    out[space.variables()[k].name] = values[k];
  return out;
}

Json intervention_json(const Intervention& i) {
  Json out = Json::object();
  for (const auto& [name, v] : i.assignments()) out[name] = v;
  return out;
}

Json interventions_json(const std::vector<Intervention>& list) {
  Json out = Json::array();
  for (const auto& i : list) out.push_back(intervention_json(i));
  return out;
}

Json map_table_json(const VariableMap& map) {
  Json out = Json::array();
  for (const auto& [from, to] : map.rows()) {
    out.push_back({{"from", assignment_json(map.source(), from)},
                   {"to", assignment_json(map.target(), to)}});
  }
  return out;
}

}  // namespace cak
