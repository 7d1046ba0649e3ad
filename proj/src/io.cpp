#include "cak/io.hpp"

#include <set>

#include "cak/errors.hpp"

namespace cak {

namespace {

Value as_value(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw InputError(what + " must be an integer");
  return j.get<Value>();
}

const Json& field(const Json& j, const char* name, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be an object");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(where + " has no \"" + name + "\" field");
  return *it;
}

std::string as_string(const Json& j, const std::string& what) {
  if (!j.is_string()) throw InputError(what + " must be a string");
  return j.get<std::string>();
}

std::vector<Value> domain_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.empty()) throw InputError(what + " must be a non-empty array");
  std::vector<Value> out;
  for (const auto& v : j) out.push_back(as_value(v, what + " entry"));
  return out;
}

// A total assignment over `space` given as an object.
std::vector<Value> assignment_from_json(const Json& j, const Space& space,
                                        const std::string& what) {
  if (!j.is_object()) throw InputError(what + " must be an object");
  std::vector<Value> out(space.arity());
  std::vector<bool> seen(space.arity(), false);
  for (const auto& [name, v] : j.items()) {
    auto p = space.position(name);
    if (!p) throw InputError(what + " names unknown variable '" + name + "'");
    out[*p] = as_value(v, what + "." + name);
    seen[*p] = true;
  }
  for (std::size_t k = 0; k < space.arity(); ++k)
    if (!seen[k]) throw InputError(what + " has no value for " + space.variables()[k].name);
  return out;
}

std::vector<VariableDecl> decls_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw InputError(what + " must be an array");
  std::vector<VariableDecl> out;
  for (const auto& d : j) {
    std::string name = as_string(field(d, "name", what + " entry"), what + " name");
    out.push_back({name, domain_from_json(field(d, "domain", name), "domain of " + name)});
  }
  return out;
}

}  // namespace

Json parse_json_text(std::string_view text, const std::string& what) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + ": " + e.what());
  }
}

CausalModel model_from_json(const Json& j) {
  auto exo = decls_from_json(field(j, "exogenous", "model"), "exogenous");
  const Json& endo_json = field(j, "endogenous", "model");
  if (!endo_json.is_array()) throw InputError("endogenous must be an array");
  std::vector<EquationSpec> endo;
  for (const auto& d : endo_json) {
    std::string name = as_string(field(d, "name", "endogenous entry"), "endogenous name");
    endo.push_back({name, domain_from_json(field(d, "domain", name), "domain of " + name),
                    as_string(field(d, "equation", name), "equation of " + name)});
  }
  auto allowed = AllowedInterventions::all();
  if (auto it = j.find("allowed_interventions"); it != j.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "all")
        throw InputError("allowed_interventions must be \"all\" or an array");
    } else if (it->is_array()) {
      std::vector<Intervention> list;
      for (const auto& i : *it) list.push_back(intervention_from_json(i));
      allowed = AllowedInterventions::only(std::move(list));
    } else {
      throw InputError("allowed_interventions must be \"all\" or an array");
    }
  }
  return make_model(std::move(exo), endo, std::move(allowed));
}

Json model_to_json(const CausalModel& model) {
  Json exo = Json::array(), endo = Json::array();
  for (const auto& d : model.signature().exogenous())
    exo.push_back({{"name", d.name}, {"domain", d.domain}});
  const auto& vars = model.signature().endogenous();
  for (std::size_t k = 0; k < vars.size(); ++k) {
    endo.push_back({{"name", vars[k].name},
                    {"domain", vars[k].domain},
                    {"equation", model.equations()[k].to_string()}});
  }
  Json allowed = model.allowed().is_all()
                     ? Json("all")
                     : interventions_json(model.allowed().list());
  return {{"exogenous", exo}, {"endogenous", endo}, {"allowed_interventions", allowed}};
}

Intervention intervention_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("an intervention must be an object");
  std::map<std::string, Value> out;
  for (const auto& [name, v] : j.items()) out[name] = as_value(v, "value of " + name);
  return Intervention(std::move(out));
}

RationalDistribution distribution_from_json(const Json& j, const CausalModel& model) {
  if (!j.is_array()) throw InputError("a distribution must be an array");
  const Space& contexts = model.signature().contexts();
  std::map<Context, Rational> masses;
  for (const auto& entry : j) {
    Context c{assignment_from_json(field(entry, "context", "distribution entry"),
                                   contexts, "context")};
    for (std::size_t k = 0; k < c.values.size(); ++k) {
      if (!contexts.in_domain(k, c.values[k]))
        throw InputError("context " + contexts.describe(c.values) + " is outside the domains");
    }
    const Json& p = field(entry, "p", "distribution entry");
    Rational mass = p.is_string() ? parse_rational(p.get<std::string>())
                                  : Rational(as_value(p, "p"));
    if (!masses.emplace(c, mass).second)
      throw InputError("context " + contexts.describe(c.values) + " is listed twice");
  }
  RationalDistribution d(std::move(masses));
  require_distribution(model, d);
  return d;
}

Json distribution_to_json(const CausalModel& model, const RationalDistribution& d) {
  Json out = Json::array();
  for (const auto& [c, p] : d.masses()) {
    out.push_back({{"context", assignment_json(model.signature().contexts(), c.values)},
                   {"p", to_string(p)}});
  }
  return out;
}

InterventionMap intervention_map_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("an intervention map must be an array");
  std::vector<std::pair<Intervention, Intervention>> entries;
  for (const auto& e : j) {
    entries.emplace_back(intervention_from_json(field(e, "from", "ω entry")),
                         intervention_from_json(field(e, "to", "ω entry")));
  }
  return InterventionMap(std::move(entries));
}

Json intervention_map_to_json(const InterventionMap& omega) {
  Json out = Json::array();
  for (const auto& [from, to] : omega.entries())
    out.push_back({{"from", intervention_json(from)}, {"to", intervention_json(to)}});
  return out;
}

VariableMap variable_map_from_json(const Json& j, const Space& source,
                                   const Space& target, const Limits& limits) {
  if (!j.is_object()) throw InputError("a map must be an object");
  if (j.contains("table") == j.contains("exprs"))
    throw InputError("a map needs exactly one of \"table\" and \"exprs\"");
  if (j.contains("table")) {
    const Json& rows = j["table"];
    if (!rows.is_array()) throw InputError("table must be an array");
    std::vector<VariableMap::Row> out;
    for (const auto& r : rows) {
      out.emplace_back(assignment_from_json(field(r, "from", "table row"), source, "from"),
                       assignment_from_json(field(r, "to", "table row"), target, "to"));
    }
    return VariableMap::from_table(source, target, out, limits);
  }
  const Json& exprs = j["exprs"];
  if (!exprs.is_object()) throw InputError("exprs must be an object");
  std::map<std::string, Expression> out;
  for (const auto& [name, text] : exprs.items()) {
    try {
      out.emplace(name, Expression::parse(as_string(text, "expression for " + name)));
    } catch (const InputError& e) {
      throw InputError("expression for " + name + ": " + e.what());
    }
  }
  return VariableMap::from_expressions(source, target, out, limits);
}

Json variable_map_to_json(const VariableMap& map) {
  if (const auto& exprs = map.expressions()) {
    Json out = Json::object();
    for (const auto& d : map.target().variables()) out[d.name] = exprs->at(d.name).to_string();
    return {{"exprs", out}};
  }
  return {{"table", map_table_json(map)}};
}

Partition partition_from_json(const Json& j, const CausalModel& high) {
  const Json& cells = field(j, "cells", "partition");
  if (!cells.is_object()) throw InputError("partition cells must be an object");
  auto names = [](const Json& list, const std::string& what) {
    if (!list.is_array()) throw InputError(what + " must be an array");
    std::vector<std::string> out;
    for (const auto& n : list) out.push_back(as_string(n, what + " entry"));
    return out;
  };
  Partition p;
  for (const auto& d : high.signature().endogenous()) {
    auto it = cells.find(d.name);
    if (it == cells.end()) throw InputError("partition has no cell for " + d.name);
    p.cells.emplace_back(d.name, names(*it, "cell " + d.name));
  }
  for (const auto& [name, members] : cells.items()) {
    if (!high.signature().states().position(name))
      throw InputError("partition has a cell for unknown high variable '" + name + "'");
  }
  if (auto it = j.find("marginal"); it != j.end()) p.marginal = names(*it, "marginal");
  return p;
}

Json bundle_to_json(const ExampleBundle& bundle) {
  Json out = {{"name", bundle.name},
              {"description", bundle.description},
              {"low", model_to_json(bundle.low)},
              {"high", model_to_json(bundle.high)},
              {"tau", variable_map_to_json(bundle.tau)}};
  if (bundle.omega) out["omega"] = intervention_map_to_json(*bundle.omega);
  if (bundle.low_dist) out["low_distribution"] = distribution_to_json(bundle.low, *bundle.low_dist);
  if (bundle.high_dist)
    out["high_distribution"] = distribution_to_json(bundle.high, *bundle.high_dist);
  if (bundle.partition) out["partition"] = partition_json(*bundle.partition);
  Json expected = Json::object();
  for (const auto& [check, e] : bundle.expected) {
    bool checked = e.derived || !e.disagreement.empty();
    Json entry = {{"holds", e.holds},
                  {"basis", checked ? "exhaustive check" : "example statement"}};
    if (!e.disagreement.empty()) entry["note"] = e.disagreement;
    expected[check] = entry;
  }
  out["expected"] = expected;
  return out;
}

}  // namespace cak
