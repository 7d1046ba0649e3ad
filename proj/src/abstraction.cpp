#include "cak/abstraction.hpp"

#include <algorithm>
#include <set>

#include "cak/errors.hpp"

namespace cak {

namespace {

constexpr std::size_t kNone = VariableMap::kUndefined;
constexpr std::size_t kSummaryCap = 12;

using Fixed = std::vector<std::optional<Value>>;

Fixed fixed_positions(const Space& space, const Intervention& i) {
  Fixed out(space.arity());
  for (const auto& [name, v] : i.assignments()) {
    auto p = space.position(name);
    if (!p) throw InputError("unknown variable '" + name + "'");
    if (!space.in_domain(*p, v)) {
      throw InputError("value " + std::to_string(v) +
                       " is outside the domain of " + name);
    }
    out[*p] = v;
  }
  return out;
}

std::size_t extension_count(const Space& space, const Fixed& fixed) {
  std::size_t count = 1;
  for (std::size_t k = 0; k < space.arity(); ++k) {
    if (fixed[k]) continue;
    std::size_t d = space.variables()[k].domain.size();
    if (count > std::numeric_limits<std::size_t>::max() / d)
      return std::numeric_limits<std::size_t>::max();
    count *= d;
  }
  return count;
}

// Calls f on every total assignment agreeing with `fixed`, in index order.
template <class F>
void for_each_extension(const Space& space, const Fixed& fixed, F&& f) {
  const auto& vars = space.variables();
  std::vector<std::size_t> free;
  std::vector<std::size_t> digit(vars.size(), 0);
  std::vector<Value> a(vars.size());
  for (std::size_t k = 0; k < vars.size(); ++k) {
    if (fixed[k]) {
      a[k] = *fixed[k];
    } else {
      free.push_back(k);
      a[k] = vars[k].domain.front();
    }
  }
  for (;;) {
    f(static_cast<const std::vector<Value>&>(a));
    std::size_t j = free.size();
    while (j-- > 0) {
      std::size_t k = free[j];
      if (++digit[k] < vars[k].domain.size()) {
        a[k] = vars[k].domain[digit[k]];
        break;
      }
      digit[k] = 0;
      a[k] = vars[k].domain.front();
    }
    if (j == static_cast<std::size_t>(-1)) return;
  }
}

// Distinct high-state indices of τ(Rst(x)), in first-seen order.
std::vector<std::size_t> image_of_rst(const StateMap& tau, const Fixed& fixed) {
  std::vector<char> hit(tau.target().count(), 0);
  std::vector<std::size_t> out;
  for_each_extension(tau.source(), fixed, [&](const std::vector<Value>& a) {
    std::size_t t = tau.image_index(tau.source().index_of(a));
    if (t == kNone) {
      throw InputError("τ is undefined on " + tau.source().describe(a));
    }
    if (!hit[t]) {
      hit[t] = 1;
      out.push_back(t);
    }
  });
  return out;
}

std::string join(const std::vector<Intervention>& list, std::size_t cap) {
  std::string out;
  for (std::size_t k = 0; k < list.size() && k < cap; ++k)
    out += (k ? ", {" : "{") + list[k].to_string() + "}";
  if (list.size() > cap) out += ", ...";
  return out;
}

void require_total(const StateMap& tau) {
  if (auto missing = tau.first_undefined()) {
    throw InputError("τ is undefined on " + tau.source().describe(*missing));
  }
}

}  // namespace

std::vector<std::vector<Value>> rst(const Space& space, const Intervention& fixed,
                                    const Limits& limits) {
  Fixed f = fixed_positions(space, fixed);
  std::size_t count = extension_count(space, f);
  if (count > limits.max_contexts) {
    throw SizeLimitError("restriction has " + std::to_string(count) +
                         " states, above the cap of " +
                         std::to_string(limits.max_contexts));
  }
  std::vector<std::vector<Value>> out;
  out.reserve(count);
  for_each_extension(space, f, [&](const std::vector<Value>& a) { out.push_back(a); });
  return out;
}

std::optional<Intervention> derive_omega_tau(const StateMap& tau,
                                             const Intervention& i,
                                             const Limits& limits) {
  Fixed fixed = fixed_positions(tau.source(), i);
  if (extension_count(tau.source(), fixed) > limits.max_contexts) {
    throw SizeLimitError("restriction of {" + i.to_string() +
                         "} is above the state cap");
  }
  auto image = image_of_rst(tau, fixed);
  const Space& target = tau.target();
  std::vector<Value> first = target.at(image.front());
  std::vector<bool> constant(target.arity(), true);
  for (std::size_t t : image) {
    auto values = target.at(t);
    for (std::size_t k = 0; k < values.size(); ++k)
      if (values[k] != first[k]) constant[k] = false;
  }
  // The image lies inside Rst(y) for the constant coordinates y; equality
  // is a matter of size.
  std::size_t expected = 1;
  std::map<std::string, Value> y;
  for (std::size_t k = 0; k < target.arity(); ++k) {
    if (constant[k]) {
      y.emplace(target.variables()[k].name, first[k]);
    } else {
      expected *= target.variables()[k].domain.size();
    }
  }
  if (image.size() != expected) return std::nullopt;
  return Intervention(std::move(y));
}

std::vector<Intervention> omega_tau_candidates(const StateMap& tau,
                                               const Intervention& i,
                                               const Limits& limits) {
  auto image = image_of_rst(tau, fixed_positions(tau.source(), i));
  std::set<std::size_t> image_set(image.begin(), image.end());
  const Space& target = tau.target();
  CausalModel shape(Signature({}, target.variables()),
                    std::vector<Expression>(target.arity(), Expression::literal(0)));
  std::vector<Intervention> out;
  for (const auto& y : enumerate_all(shape, limits)) {
    std::set<std::size_t> r;
    for (const auto& a : rst(target, y, limits)) r.insert(target.index_of(a));
    if (r == image_set) out.push_back(y);
  }
  return out;
}

InducedSets compute_induced_sets(const CausalModel& low, const CausalModel& high,
                                 const StateMap& tau, const Limits& limits) {
  require_tau_fits(low, high, tau);
  InducedSets out;
  std::vector<std::pair<Intervention, Intervention>> entries;
  std::set<Intervention> seen;
  for (const auto& i : enumerate_all(low, limits)) {
    auto image = derive_omega_tau(tau, i, limits);
    if (!image) {
      out.undefined.push_back(i);
      continue;
    }
    out.low.push_back(i);
    if (seen.insert(*image).second) out.high.push_back(*image);
    entries.emplace_back(i, std::move(*image));
  }
  out.omega = InterventionMap(std::move(entries));
  return out;
}

CheckReport check_tau_abstraction(const CausalModel& low, const CausalModel& high,
                                  const StateMap& tau, const Limits& limits) {
  require_tau_fits(low, high, tau);
  require_total(tau);
  const Space& high_states = high.signature().states();
  CheckReport report;

  auto missed = tau.missed_targets();
  if (!missed.empty()) {
    Json states = Json::array();
    for (std::size_t k = 0; k < missed.size() && k < 20; ++k)
      states.push_back(assignment_json(high_states, missed[k]));
    report.condition = "tau_surjective";
    report.summary = "τ is not surjective: " + std::to_string(missed.size()) +
                     " high states, including " +
                     high_states.describe(missed.front()) +
                     ", are not the image of any low state";
    report.counterexample = {{"unreached_high_states", states},
                             {"unreached_count", missed.size()}};
    return report;
  }

  auto low_list = low.allowed_interventions(limits);
  auto high_list = high.allowed_interventions(limits);
  std::vector<std::pair<Intervention, Intervention>> entries;
  std::vector<Intervention> undefined;
  for (const auto& i : low_list) {
    auto image = derive_omega_tau(tau, i, limits);
    if (image) {
      entries.emplace_back(i, std::move(*image));
    } else {
      undefined.push_back(i);
    }
  }
  if (!undefined.empty()) {
    report.condition = "omega_defined";
    report.summary = "ω_τ is undefined on " + std::to_string(undefined.size()) +
                     " allowed low interventions: " + join(undefined, kSummaryCap) +
                     "; τ of their restriction sets is not a restriction set";
    report.counterexample = {{"undefined_low_interventions",
                              interventions_json(undefined)}};
    return report;
  }
  InterventionMap omega(std::move(entries));

  auto compatible = find_compatible_tau_u(low, high, tau, omega, low_list,
                                          {.require_surjective = true}, limits);
  if (!compatible.holds) return compatible;

  const auto induced = omega.image();
  std::set<Intervention> image(induced.begin(), induced.end());
  std::set<Intervention> allowed(high_list.begin(), high_list.end());
  std::vector<Intervention> not_hit, extra;
  for (const auto& h : high_list)
    if (!image.count(h)) not_hit.push_back(h);
  for (const auto& h : induced)
    if (!allowed.count(h)) extra.push_back(h);
  if (!not_hit.empty() || !extra.empty()) {
    report.condition = "intervention_sets";
    report.summary =
        !not_hit.empty()
            ? "allowed high interventions not induced by any allowed low one: " +
                  join(not_hit, kSummaryCap)
            : "induced high interventions that are not allowed: " +
                  join(extra, kSummaryCap);
    report.counterexample = {{"allowed_but_not_induced", interventions_json(not_hit)},
                             {"induced_but_not_allowed", interventions_json(extra)}};
    return report;
  }

  report.holds = true;
  report.summary = "τ is surjective, ω_τ maps the " +
                   std::to_string(low_list.size()) + " allowed low interventions onto the " +
                   std::to_string(high_list.size()) +
                   " allowed high ones, and a surjective compatible τ_U exists";
  Json omega_table = Json::array();
  for (const auto& [from, to] : omega.entries())
    omega_table.push_back({{"from", intervention_json(from)}, {"to", intervention_json(to)}});
  report.witness = compatible.witness;
  report.witness["omega_tau"] = omega_table;
  report.tau_u = std::move(compatible.tau_u);
  return report;
}

CheckReport check_strong_abstraction(const CausalModel& low,
                                     const CausalModel& high,
                                     const StateMap& tau, const Limits& limits) {
  require_tau_fits(low, high, tau);
  require_total(tau);
  auto induced = compute_induced_sets(low, high, tau, limits);
  std::set<Intervention> induced_high(induced.high.begin(), induced.high.end());
  std::vector<Intervention> missing;
  auto all_high = enumerate_all(high, limits);
  for (const auto& h : all_high)
    if (!induced_high.count(h)) missing.push_back(h);

  CheckReport report;
  if (!missing.empty()) {
    report.condition = "induced_high_interventions";
    report.summary = std::to_string(missing.size()) + " of " +
                     std::to_string(all_high.size()) +
                     " high interventions are not induced by any low intervention: " +
                     join(missing, kSummaryCap);
    report.counterexample = {{"missing_high_interventions", interventions_json(missing)},
                             {"missing_count", missing.size()}};
    return report;
  }

  auto inner = check_tau_abstraction(
      low.with_allowed(AllowedInterventions::only(induced.low)),
      high.with_allowed(AllowedInterventions::only(induced.high)), tau, limits);
  if (!inner.holds) {
    inner.summary = "with the induced intervention sets: " + inner.summary;
    return inner;
  }
  inner.summary = "every high intervention is induced (" +
                  std::to_string(induced.high.size()) + "), and " + inner.summary;
  inner.witness["induced_low_count"] = induced.low.size();
  inner.witness["induced_high_count"] = induced.high.size();
  return inner;
}

void require_partition(const CausalModel& low, const CausalModel& high,
                       const Partition& partition) {
  const Space& low_states = low.signature().states();
  const auto& high_vars = high.signature().endogenous();
  if (partition.cells.size() != high_vars.size()) {
    throw InputError("partition has " + std::to_string(partition.cells.size()) +
                     " cells but the high model has " +
                     std::to_string(high_vars.size()) + " endogenous variables");
  }
  std::set<std::string> used;
  auto claim = [&](const std::string& name) {
    if (!low_states.position(name)) {
      throw InputError("partition names unknown low variable '" + name + "'");
    }
    if (!used.insert(name).second) {
      throw InputError("partition uses low variable '" + name + "' twice");
    }
  };
  for (std::size_t k = 0; k < high_vars.size(); ++k) {
    const auto& [name, members] = partition.cells[k];
    if (name != high_vars[k].name) {
      throw InputError("partition cell " + std::to_string(k + 1) + " is for '" +
                       name + "', expected '" + high_vars[k].name + "'");
    }
    if (members.empty()) throw InputError("partition cell for " + name + " is empty");
    for (const auto& m : members) claim(m);
  }
  for (const auto& m : partition.marginal) claim(m);
  if (used.size() != low_states.arity()) {
    for (const auto& v : low_states.variables()) {
      if (!used.count(v.name)) {
        throw InputError("partition does not cover low variable '" + v.name + "'");
      }
    }
  }
}

namespace {

std::vector<std::vector<std::size_t>> cell_positions(const Space& low_states,
                                                     const Partition& partition) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& [name, members] : partition.cells) {
    out.emplace_back();
    for (const auto& m : members) out.back().push_back(*low_states.position(m));
  }
  return out;
}

std::vector<Value> project(const std::vector<Value>& state,
                           const std::vector<std::size_t>& positions) {
  std::vector<Value> out;
  out.reserve(positions.size());
  for (std::size_t p : positions) out.push_back(state[p]);
  return out;
}

std::string describe_cell(const Space& low_states,
                          const std::vector<std::size_t>& positions,
                          const std::vector<Value>& values) {
  std::string out;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    out += (k ? ", " : "") + low_states.variables()[positions[k]].name + "=" +
           std::to_string(values[k]);
  }
  return out;
}

}  // namespace

Factoring derive_component_maps(const CausalModel& low, const CausalModel& high,
                                const StateMap& tau, const Partition& partition,
                                const Limits& limits) {
  require_tau_fits(low, high, tau);
  require_total(tau);
  require_partition(low, high, partition);
  const Space& low_states = low.signature().states();
  const Space& high_states = high.signature().states();
  low_states.require_at_most(limits.max_contexts, "low state space");
  auto cells = cell_positions(low_states, partition);

  ComponentMaps maps;
  // First low state seen for each cell value, to name a clash.
  std::vector<std::map<std::vector<Value>, std::vector<Value>>> first_seen(cells.size());
  std::vector<Value> a = low_states.first();
  do {
    auto image = tau.apply(a);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      auto key = project(a, cells[k]);
      auto& table = maps.tables[partition.cells[k].first];
      auto [it, inserted] = table.emplace(key, image[k]);
      if (inserted) {
        first_seen[k].emplace(key, a);
        continue;
      }
      if (it->second == image[k]) continue;
      const auto& other = first_seen[k].at(key);
      Factoring f;
      f.summary = "τ does not factor through the partition: low states " +
                  low_states.describe(other) + " and " + low_states.describe(a) +
                  " agree on " + describe_cell(low_states, cells[k], key) +
                  " but τ gives " + partition.cells[k].first + "=" +
                  std::to_string(it->second) + " and " +
                  std::to_string(image[k]);
      f.counterexample = {
          {"high_variable", partition.cells[k].first},
          {"first_low_state", assignment_json(low_states, other)},
          {"second_low_state", assignment_json(low_states, a)},
          {"first_high_state", assignment_json(high_states, tau.apply(other))},
          {"second_high_state", assignment_json(high_states, image)}};
      return f;
    }
  } while (low_states.advance(a));
  Factoring f;
  f.maps = std::move(maps);
  return f;
}

CheckReport check_constructive(const CausalModel& low, const CausalModel& high,
                               const StateMap& tau, const Partition& partition,
                               const std::optional<ComponentMaps>& maps,
                               const Limits& limits) {
  require_tau_fits(low, high, tau);
  require_total(tau);
  require_partition(low, high, partition);
  const Space& low_states = low.signature().states();
  CheckReport report;

  ComponentMaps used;
  if (maps) {
    used = *maps;
    auto cells = cell_positions(low_states, partition);
    std::vector<Value> a = low_states.first();
    do {
      auto image = tau.apply(a);
      for (std::size_t k = 0; k < cells.size(); ++k) {
        const auto& name = partition.cells[k].first;
        auto key = project(a, cells[k]);
        auto table = used.tables.find(name);
        if (table == used.tables.end()) {
          throw InputError("no component map for " + name);
        }
        auto row = table->second.find(key);
        if (row == table->second.end()) {
          throw InputError("component map for " + name + " is undefined on " +
                           describe_cell(low_states, cells[k], key));
        }
        if (row->second == image[k]) continue;
        report.condition = "factoring";
        report.summary = "at low state " + low_states.describe(a) + " τ gives " +
                         name + "=" + std::to_string(image[k]) +
                         " but the component map gives " +
                         std::to_string(row->second);
        report.counterexample = {
            {"low_state", assignment_json(low_states, a)},
            {"high_variable", name},
            {"tau_value", image[k]},
            {"component_value", row->second}};
        return report;
      }
    } while (low_states.advance(a));
  } else {
    auto factoring = derive_component_maps(low, high, tau, partition, limits);
    if (!factoring.maps) {
      report.condition = "factoring";
      report.summary = factoring.summary;
      report.counterexample = factoring.counterexample;
      return report;
    }
    used = std::move(*factoring.maps);
  }

  auto strong = check_strong_abstraction(low, high, tau, limits);
  if (!strong.holds) return strong;
  strong.summary = "τ factors through the partition, and " + strong.summary;
  strong.witness["partition"] = partition_json(partition);
  strong.witness["component_maps"] = component_maps_json(partition, used);
  return strong;
}

PartitionSearch search_constructive_partition(const CausalModel& low,
                                              const CausalModel& high,
                                              const StateMap& tau,
                                              const Limits& limits) {
  require_tau_fits(low, high, tau);
  require_total(tau);
  const Space& low_states = low.signature().states();
  const Space& high_states = high.signature().states();
  const std::size_t n_low = low_states.arity();
  const std::size_t n_high = high_states.arity();
  if (n_low > limits.max_partition_variables) {
    throw SizeLimitError("partition search handles at most " +
                         std::to_string(limits.max_partition_variables) +
                         " low variables, the low model has " +
                         std::to_string(n_low));
  }
  low_states.require_at_most(limits.max_contexts, "low state space");

  // owner[x]: the high variable whose τ-coordinate changes with x alone.
  std::vector<std::optional<std::size_t>> owner(n_low);
  PartitionSearch out;
  std::vector<Value> a = low_states.first();
  do {
    auto base = tau.apply(a);
    for (std::size_t x = 0; x < n_low; ++x) {
      std::vector<Value> b = a;
      for (Value v : low_states.variables()[x].domain) {
        b[x] = v;
        auto moved = tau.apply(b);
        for (std::size_t y = 0; y < n_high; ++y) {
          if (moved[y] == base[y]) continue;
          if (owner[x] && *owner[x] != y) {
            const std::string& name = low_states.variables()[x].name;
            out.report.condition = "factoring";
            out.report.summary =
                "no partition factors τ: " + high_states.variables()[*owner[x]].name +
                " and " + high_states.variables()[y].name + " both depend on " + name;
            out.report.counterexample = {
                {"low_variable", name},
                {"high_variables",
                 {high_states.variables()[*owner[x]].name,
                  high_states.variables()[y].name}}};
            return out;
          }
          owner[x] = y;
        }
      }
    }
  } while (low_states.advance(a));

  // Label free variables in order, marginal first, keeping enough free
  // variables for high variables whose cells are still empty.
  std::vector<std::size_t> forced_count(n_high, 0);
  for (const auto& o : owner)
    if (o) ++forced_count[*o];
  std::vector<std::size_t> label(n_low, n_high);  // n_high marks the marginal cell
  std::vector<std::size_t> filled = forced_count;
  std::size_t free_left = 0;
  for (const auto& o : owner) free_left += !o;
  auto empty_cells = [&] {
    std::size_t n = 0;
    for (std::size_t y = 0; y < n_high; ++y) n += filled[y] == 0;
    return n;
  };
  for (std::size_t x = 0; x < n_low; ++x) {
    if (owner[x]) {
      label[x] = *owner[x];
      continue;
    }
    --free_left;
    if (empty_cells() <= free_left) continue;  // marginal is fine
    for (std::size_t y = 0; y < n_high; ++y) {
      if (filled[y] == 0) {
        label[x] = y;
        ++filled[y];
        break;
      }
    }
  }
  if (empty_cells() > 0) {
    std::string names;
    for (std::size_t y = 0; y < n_high; ++y)
      if (filled[y] == 0) names += (names.empty() ? "" : ", ") + high_states.variables()[y].name;
    out.report.condition = "factoring";
    out.report.summary = "no partition factors τ: too few low variables are left "
                         "for the cells of " + names;
    out.report.counterexample = {{"empty_cells", names}};
    return out;
  }

  Partition partition;
  for (std::size_t y = 0; y < n_high; ++y)
    partition.cells.emplace_back(high_states.variables()[y].name, std::vector<std::string>{});
  for (std::size_t x = 0; x < n_low; ++x) {
    const std::string& name = low_states.variables()[x].name;
    if (label[x] == n_high) {
      partition.marginal.push_back(name);
    } else {
      partition.cells[label[x]].second.push_back(name);
    }
  }
  auto factoring = derive_component_maps(low, high, tau, partition, limits);
  out.partition = partition;
  out.maps = factoring.maps;
  out.report = check_constructive(low, high, tau, partition, factoring.maps, limits);
  return out;
}

Json partition_json(const Partition& partition) {
  Json cells = Json::object();
  for (const auto& [name, members] : partition.cells) cells[name] = members;
  return {{"cells", cells}, {"marginal", partition.marginal}};
}

Json component_maps_json(const Partition& partition, const ComponentMaps& maps) {
  Json out = Json::object();
  for (const auto& [name, members] : partition.cells) {
    Json rows = Json::array();
    auto it = maps.tables.find(name);
    if (it == maps.tables.end()) continue;
    for (const auto& [key, value] : it->second) {
      Json from = Json::object();
      for (std::size_t k = 0; k < members.size(); ++k) from[members[k]] = key[k];
      rows.push_back({{"from", from}, {"to", value}});
    }
    out[name] = rows;
  }
  return out;
}

}  // namespace cak
