#include "cak/transform.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "cak/errors.hpp"

namespace cak {

namespace {

constexpr std::size_t kNone = VariableMap::kUndefined;
// Long lists in counterexamples are cut to this many entries.
constexpr std::size_t kListCap = 20;

std::vector<std::vector<Value>> all_assignments(const Space& space) {
  std::vector<std::vector<Value>> out;
  out.reserve(space.count());
  std::vector<Value> a = space.first();
  do {
    out.push_back(a);
  } while (space.advance(a));
  return out;
}

std::string omega_problem(const OmegaCheck& check) {
  if (!check.surjective) {
    return "ω is not surjective: nothing maps to {" +
           check.missed.front().to_string() + "}";
  }
  const auto& [a, b] = check.order_violations.front();
  return "ω is not order-preserving: {" + a.to_string() + "} ≺ {" +
         b.to_string() + "} but their images are not ordered";
}

// High-state index of τ(M_L(u, i)); throws when τ is undefined there.
std::size_t tau_response(const CausalModel& low, const StateMap& tau,
                         const Context& u, const Overrides& o,
                         const Intervention& i) {
  EndoState s = low.solve(u, o);
  const Space& states = low.signature().states();
  std::size_t t = tau.image_index(states.index_of(s.values));
  if (t == kNone) {
    throw InputError("τ is undefined on " + states.describe(s.values) +
                     ", which the low model reaches under {" + i.to_string() +
                     "}");
  }
  return t;
}

}  // namespace

void require_tau_fits(const CausalModel& low, const CausalModel& high,
                      const StateMap& tau) {
  require_same_variables(low.signature().endogenous(),
                         tau.source().variables(),
                         "τ source does not match the low model");
  require_same_variables(high.signature().endogenous(),
                         tau.target().variables(),
                         "τ target does not match the high model");
}

CheckReport check_exact(const CausalModel& low, const RationalDistribution& low_dist,
                        const CausalModel& high, const RationalDistribution& high_dist,
                        const StateMap& tau, const InterventionMap& omega,
                        const Limits& limits) {
  require_tau_fits(low, high, tau);
  auto low_list = low.allowed_interventions(limits);
  auto high_list = high.allowed_interventions(limits);
  auto omega_check = check_omega(omega, low_list, high_list);
  if (!omega_check.ok()) throw InputError(omega_problem(omega_check));

  const Space& high_states = high.signature().states();
  CheckReport report;
  for (const auto& i : low_list) {
    const Intervention& target = omega.at(i);
    auto expected = interventional_dist(high, high_dist, target);
    auto pushed = tau_pushforward(tau, interventional_dist(low, low_dist, i));
    if (expected == pushed) continue;
    std::set<EndoState> states;
    for (const auto& [s, p] : expected.masses()) states.insert(s);
    for (const auto& [s, p] : pushed.masses()) states.insert(s);
    for (const auto& s : states) {
      if (expected.mass(s) == pushed.mass(s)) continue;
      report.condition = "exact";
      report.summary = "under {" + i.to_string() + "} (high {" +
                       target.to_string() + "}) the high state " +
                       high_states.describe(s.values) + " has probability " +
                       to_string(expected.mass(s)) +
                       " in the high model but " + to_string(pushed.mass(s)) +
                       " after pushing the low model through τ";
      report.counterexample = {
          {"low_intervention", intervention_json(i)},
          {"high_intervention", intervention_json(target)},
          {"high_state", assignment_json(high_states, s.values)},
          {"high_probability", to_string(expected.mass(s))},
          {"pushforward_probability", to_string(pushed.mass(s))},
      };
      return report;
    }
  }
  report.holds = true;
  report.summary = "the pushforward matches the high model under all " +
                   std::to_string(low_list.size()) +
                   " allowed low interventions";
  return report;
}

CheckReport check_compatible(const ContextMap& tau_u, const StateMap& tau,
                             const InterventionMap& omega,
                             const CausalModel& low, const CausalModel& high,
                             const std::vector<Intervention>& interventions,
                             const Limits& limits) {
  require_tau_fits(low, high, tau);
  require_same_variables(low.signature().exogenous(),
                         tau_u.source().variables(),
                         "τ_U source does not match the low model");
  require_same_variables(high.signature().exogenous(),
                         tau_u.target().variables(),
                         "τ_U target does not match the high model");
  if (auto missing = tau_u.first_undefined()) {
    throw InputError("τ_U is undefined on " +
                     tau_u.source().describe(*missing));
  }
  const Space& low_contexts = low.signature().contexts();
  low_contexts.require_at_most(limits.max_contexts, "low context space");
  const Space& high_states = high.signature().states();

  std::vector<Overrides> lo, ho;
  for (const auto& i : interventions) {
    lo.push_back(low.overrides_for(i));
    ho.push_back(high.overrides_for(omega.at(i)));
  }
  CheckReport report;
  std::vector<Value> a = low_contexts.first();
  do {
    Context u{a};
    Context h = tau_u(u);
    for (std::size_t k = 0; k < interventions.size(); ++k) {
      std::size_t want = tau_response(low, tau, u, lo[k], interventions[k]);
      EndoState got = high.solve(h, ho[k]);
      if (high_states.index_of(got.values) == want) continue;
      std::vector<Value> want_values = high_states.at(want);
      report.condition = "compatible";
      report.summary = "low context " + low_contexts.describe(a) + " under {" +
                       interventions[k].to_string() + "} gives τ-state " +
                       high_states.describe(want_values) + ", but high context " +
                       high.signature().contexts().describe(h.values) +
                       " under {" + omega.at(interventions[k]).to_string() +
                       "} gives " + high_states.describe(got.values);
      report.counterexample = {
          {"low_context", assignment_json(low_contexts, a)},
          {"high_context", assignment_json(high.signature().contexts(), h.values)},
          {"low_intervention", intervention_json(interventions[k])},
          {"high_intervention", intervention_json(omega.at(interventions[k]))},
          {"tau_of_low_state", assignment_json(high_states, want_values)},
          {"high_state", assignment_json(high_states, got.values)},
      };
      return report;
    }
  } while (low_contexts.advance(a));
  report.holds = true;
  report.summary = "τ_U is compatible on every low context and all " +
                   std::to_string(interventions.size()) + " interventions";
  return report;
}

CheckReport find_compatible_tau_u(const CausalModel& low, const CausalModel& high,
                                  const StateMap& tau, const InterventionMap& omega,
                                  const std::vector<Intervention>& interventions,
                                  const SearchOptions& options,
                                  const Limits& limits) {
  require_tau_fits(low, high, tau);
  const Space& low_contexts = low.signature().contexts();
  const Space& high_contexts = high.signature().contexts();
  const Space& high_states = high.signature().states();
  low_contexts.require_at_most(limits.max_contexts, "low context space");
  high_contexts.require_at_most(limits.max_contexts, "high context space");

  std::vector<Overrides> lo, ho;
  std::vector<Intervention> targets;
  for (const auto& i : interventions) {
    lo.push_back(low.overrides_for(i));
    targets.push_back(omega.at(i));
    ho.push_back(high.overrides_for(targets.back()));
  }
  const std::size_t n_int = interventions.size();

  // Response profile of every high context, grouped.
  const auto high_list = all_assignments(high_contexts);
  std::vector<std::vector<std::size_t>> high_profile(high_list.size());
  std::map<std::vector<std::size_t>, std::vector<std::size_t>> by_profile;
  for (std::size_t h = 0; h < high_list.size(); ++h) {
    auto& profile = high_profile[h];
    profile.reserve(n_int);
    for (const auto& o : ho) {
      profile.push_back(high_states.index_of(high.solve(Context{high_list[h]}, o).values));
    }
    by_profile[profile].push_back(h);
  }

  CheckReport report;
  const auto low_list = all_assignments(low_contexts);
  std::vector<const std::vector<std::size_t>*> correspondents(low_list.size());
  for (std::size_t l = 0; l < low_list.size(); ++l) {
    Context u{low_list[l]};
    std::vector<std::size_t> profile;
    profile.reserve(n_int);
    for (std::size_t k = 0; k < n_int; ++k)
      profile.push_back(tau_response(low, tau, u, lo[k], interventions[k]));
    auto it = by_profile.find(profile);
    if (it != by_profile.end()) {
      correspondents[l] = &it->second;
      continue;
    }

    // Keep the interventions that narrow the candidates, then drop any that
    // turn out to be unnecessary.
    auto survivors = [&](const std::vector<std::size_t>& ks) {
      std::size_t count = 0;
      for (std::size_t h = 0; h < high_list.size(); ++h) {
        bool ok = true;
        for (std::size_t k : ks) ok = ok && high_profile[h][k] == profile[k];
        count += ok;
      }
      return count;
    };
    std::vector<std::size_t> used;
    std::size_t alive = high_list.size();
    for (std::size_t k = 0; k < n_int && alive > 0; ++k) {
      used.push_back(k);
      std::size_t next = survivors(used);
      if (next == alive) used.pop_back();
      alive = next;
    }
    for (std::size_t pos = 0; pos < used.size();) {
      std::vector<std::size_t> trial;
      for (std::size_t j = 0; j < used.size(); ++j)
        if (j != pos) trial.push_back(used[j]);
      if (survivors(trial) == 0) {
        used = trial;
      } else {
        ++pos;
      }
    }

    Json requirements = Json::array();
    std::string names;
    for (std::size_t k : used) {
      auto want = high_states.at(profile[k]);
      requirements.push_back(
          {{"low_intervention", intervention_json(interventions[k])},
           {"high_intervention", intervention_json(targets[k])},
           {"required_high_state", assignment_json(high_states, want)}});
      names += (names.empty() ? "{" : ", {") + interventions[k].to_string() + "}";
    }
    report.condition = "compatible";
    report.summary =
        "no high context corresponds to low context " +
        low_contexts.describe(low_list[l]) +
        (used.size() == 1
             ? ": no high context gives the required response under " + names
             : ": the required responses under " + names +
                   " cannot be met by a single high context");
    report.counterexample = {
        {"low_context", assignment_json(low_contexts, low_list[l])},
        {"requirements", requirements},
    };
    return report;
  }

  std::vector<std::size_t> chosen(low_list.size(), kNone);
  if (options.require_surjective) {
    // Every high context needs its own low context: a matching saturating
    // the high side, found by breadth-first augmenting paths.
    std::vector<std::vector<std::size_t>> adjacent(high_list.size());
    for (std::size_t l = 0; l < low_list.size(); ++l)
      for (std::size_t h : *correspondents[l]) adjacent[h].push_back(l);
    std::vector<std::size_t> match_high(high_list.size(), kNone);
    for (std::size_t root = 0; root < high_list.size(); ++root) {
      std::vector<std::size_t> parent_high(low_list.size(), kNone);
      std::vector<bool> seen_high(high_list.size(), false);
      std::deque<std::size_t> queue{root};
      seen_high[root] = true;
      std::size_t free_low = kNone;
      while (!queue.empty() && free_low == kNone) {
        std::size_t h = queue.front();
        queue.pop_front();
        for (std::size_t l : adjacent[h]) {
          if (parent_high[l] != kNone) continue;
          parent_high[l] = h;
          if (chosen[l] == kNone) {
            free_low = l;
            break;
          }
          if (!seen_high[chosen[l]]) {
            seen_high[chosen[l]] = true;
            queue.push_back(chosen[l]);
          }
        }
      }
      if (free_low == kNone) {
        // The high contexts reached here compete for fewer low contexts.
        Json highs = Json::array(), lows = Json::array();
        std::size_t n_high = 0, n_low = 0;
        for (std::size_t h = 0; h < high_list.size(); ++h) {
          if (!seen_high[h]) continue;
          if (n_high++ < kListCap) highs.push_back(assignment_json(high_contexts, high_list[h]));
        }
        for (std::size_t l = 0; l < low_list.size(); ++l) {
          if (parent_high[l] == kNone) continue;
          if (n_low++ < kListCap) lows.push_back(assignment_json(low_contexts, low_list[l]));
        }
        report.condition = "surjective_tau_u";
        report.summary =
            n_low == 0
                ? "no low context corresponds to high context " +
                      high_contexts.describe(high_list[root])
                : std::to_string(n_high) + " high contexts, including " +
                      high_contexts.describe(high_list[root]) +
                      ", correspond only to " + std::to_string(n_low) +
                      " low contexts, so no compatible τ_U is surjective";
        report.counterexample = {
            {"high_contexts", highs}, {"high_context_count", n_high},
            {"low_contexts", lows}, {"low_context_count", n_low}};
        return report;
      }
      for (std::size_t l = free_low; l != kNone;) {
        std::size_t h = parent_high[l];
        std::size_t previous = match_high[h];
        match_high[h] = l;
        chosen[l] = h;
        l = previous;
      }
    }
  }

  std::vector<VariableMap::Row> rows;
  boost::multiprecision::cpp_int count = 1;
  for (std::size_t l = 0; l < low_list.size(); ++l) {
    if (chosen[l] == kNone) chosen[l] = correspondents[l]->front();
    rows.emplace_back(low_list[l], high_list[chosen[l]]);
    count *= correspondents[l]->size();
  }
  ContextMap tau_u(VariableMap::from_table(low_contexts, high_contexts, rows, limits));
  report.holds = true;
  report.summary = std::string("found a ") +
                   (options.require_surjective ? "surjective " : "") +
                   "compatible τ_U; " + count.str() +
                   " compatible maps exist in total";
  report.witness = {{"tau_u", map_table_json(tau_u)},
                    {"compatible_map_count", count.str()}};
  if (options.list_correspondents) {
    Json list = Json::array();
    for (std::size_t l = 0; l < low_list.size(); ++l) {
      Json highs = Json::array();
      for (std::size_t h : *correspondents[l])
        highs.push_back(assignment_json(high_contexts, high_list[h]));
      list.push_back({{"low_context", assignment_json(low_contexts, low_list[l])},
                      {"high_contexts", highs}});
    }
    report.witness["correspondents"] = list;
  }
  report.tau_u = std::move(tau_u);
  return report;
}

CheckReport check_uniform(const CausalModel& low, const CausalModel& high,
                          const StateMap& tau, const InterventionMap& omega,
                          const Limits& limits) {
  auto low_list = low.allowed_interventions(limits);
  auto high_list = high.allowed_interventions(limits);
  auto omega_check = check_omega(omega, low_list, high_list);
  if (!omega_check.ok()) throw InputError(omega_problem(omega_check));
  return find_compatible_tau_u(low, high, tau, omega, low_list, {}, limits);
}

CheckReport uniform_distribution_probe(const CausalModel& low,
                                       const CausalModel& high,
                                       const StateMap& tau,
                                       const InterventionMap& omega,
                                       const ContextMap& tau_u,
                                       std::size_t samples, std::uint64_t seed,
                                       std::uint64_t max_denominator,
                                       const Limits& limits) {
  if (max_denominator == 0) throw InputError("max denominator must be positive");
  std::mt19937_64 rng(seed);
  const Space& contexts = low.signature().contexts();
  CheckReport report;
  for (std::size_t k = 0; k < samples; ++k) {
    auto low_dist = random_distribution(contexts, rng, 1 + rng() % max_denominator);
    auto high_dist = context_pushforward(tau_u, low_dist);
    auto exact = check_exact(low, low_dist, high, high_dist, tau, omega, limits);
    if (exact.holds) continue;
    Json dist = Json::array();
    for (const auto& [u, p] : low_dist.masses())
      dist.push_back({{"context", assignment_json(contexts, u.values)},
                      {"p", to_string(p)}});
    report.condition = "exact";
    report.summary = "sample " + std::to_string(k) + ": " + exact.summary;
    report.counterexample = {{"sample", k},
                             {"low_distribution", dist},
                             {"failure", exact.counterexample}};
    return report;
  }
  report.holds = true;
  report.summary = "all " + std::to_string(samples) +
                   " sampled distributions give exact transformations";
  report.witness = {{"samples", samples}, {"seed", seed},
                    {"max_denominator", max_denominator}};
  return report;
}

std::pair<StateMap, InterventionMap> compose_transformations(
    const StateMap& lower_tau, const InterventionMap& lower_omega,
    const StateMap& upper_tau, const InterventionMap& upper_omega,
    const Limits& limits) {
  require_same_variables(lower_tau.target().variables(),
                         upper_tau.source().variables(),
                         "the intermediate state spaces do not match");
  StateMap tau(VariableMap::from_function(
      lower_tau.source(), upper_tau.target(),
      [&](std::span<const Value> v) { return upper_tau.apply(lower_tau.apply(v)); },
      limits));
  std::vector<std::pair<Intervention, Intervention>> entries;
  for (const auto& [from, middle] : lower_omega.entries()) {
    auto to = upper_omega.find(middle);
    if (!to) {
      throw InputError("the upper ω is undefined on {" + middle.to_string() +
                       "}, the image of {" + from.to_string() + "}");
    }
    entries.emplace_back(from, *to);
  }
  return {std::move(tau), InterventionMap(std::move(entries))};
}

}  // namespace cak
