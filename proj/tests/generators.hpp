#pragma once

// Random instances for the property suites.

#include <random>
#include <set>
#include <string>
#include <vector>

#include "cak/interventions.hpp"
#include "cak/maps.hpp"
#include "cak/scm.hpp"
#include "oracles.hpp"

namespace gen {

using cak::CausalModel;
using cak::Expression;
using cak::Intervention;
using cak::Value;

struct Pair {
  CausalModel low;
  CausalModel high;
  cak::StateMap tau;
  cak::ContextMap planted;  // meaningful only for planted pairs
};

// A random table over `keys` with values from `domain`.
inline Expression random_table(std::mt19937_64& rng,
                               const std::vector<cak::VariableDecl>& keys,
                               const std::vector<Value>& domain) {
  if (keys.empty()) return Expression::literal(domain[rng() % domain.size()]);
  std::vector<Expression> k;
  for (const auto& d : keys) k.push_back(Expression::variable(d.name));
  Expression::Table t;
  for (const auto& s : oracle::states(keys)) t.rows[s.values] = domain[rng() % domain.size()];
  return Expression::table(std::move(k), std::move(t));
}

// A low model that runs `high`'s equations on exogenous values computed from
// fresh binary exogenous L1..Ln by a random map (the planted τ_U), plus an
// optional leaf variable nobody reads. τ drops the leaf.
inline Pair planted(std::mt19937_64& rng, const CausalModel& high,
                    const std::string& leaf, bool surjective_tau_u) {
  const auto& hsig = high.signature();
  std::size_t n_exo = 1 + rng() % 2;
  const std::size_t n_high = hsig.contexts().count();
  if (surjective_tau_u)
    while ((std::size_t{1} << n_exo) < n_high) ++n_exo;
  std::vector<cak::VariableDecl> exo;
  for (std::size_t k = 1; k <= n_exo; ++k) exo.push_back({"L" + std::to_string(k), {0, 1}});
  cak::Space low_contexts(exo);

  std::vector<std::size_t> image(low_contexts.count());
  for (auto& h : image) h = rng() % n_high;
  if (surjective_tau_u) {
    for (std::size_t h = 0; h < n_high; ++h) image[h] = h;
    std::shuffle(image.begin(), image.end(), rng);
  }
  cak::ContextMap tau_u(cak::VariableMap::from_function(
      low_contexts, hsig.contexts(), [&](std::span<const Value> c) {
        return hsig.contexts().at(image[low_contexts.index_of(c)]);
      }));

  std::map<std::string, Expression> replacements;
  for (std::size_t k = 0; k < hsig.exogenous().size(); ++k) {
    std::vector<Expression> keys;
    for (const auto& d : exo) keys.push_back(Expression::variable(d.name));
    Expression::Table t;
    for (const auto& [from, to] : tau_u.rows()) t.rows[from] = to[k];
    replacements.emplace(hsig.exogenous()[k].name,
                         Expression::table(std::move(keys), std::move(t)));
  }
  std::vector<cak::VariableDecl> endo = hsig.endogenous();
  std::vector<Expression> equations;
  for (const auto& e : high.equations()) equations.push_back(e.substitute(replacements));
  bool with_leaf = rng() % 2;
  if (with_leaf) {
    std::vector<cak::VariableDecl> parents;
    for (const auto& d : exo)
      if (rng() % 2) parents.push_back(d);
    for (const auto& d : endo)
      if (rng() % 2) parents.push_back(d);
    equations.push_back(random_table(rng, parents, {0, 1}));
    endo.push_back({leaf, {0, 1}});
  }
  CausalModel low(cak::Signature(exo, endo), std::move(equations));
  const std::size_t keep = hsig.endogenous().size();
  cak::StateMap tau(cak::VariableMap::from_function(
      low.signature().states(), hsig.states(), [&](std::span<const Value> v) {
        return std::vector<Value>(v.begin(), v.begin() + keep);
      }));
  return {low, high, tau, tau_u};
}

// Keeps the assignments to variables of `target`.
inline Intervention restrict_to(const Intervention& i, const cak::Space& target) {
  std::map<std::string, Value> out;
  for (const auto& [name, v] : i.assignments())
    if (target.position(name)) out[name] = v;
  return Intervention(out);
}

// The empty intervention plus up to `extra` distinct random ones.
inline std::vector<Intervention> random_list(std::mt19937_64& rng,
                                             const CausalModel& m,
                                             std::size_t extra) {
  auto all = cak::enumerate_all(m);
  std::set<Intervention> picked{Intervention()};
  std::size_t n = rng() % (extra + 1);
  for (std::size_t k = 0; k < n; ++k) picked.insert(all[rng() % all.size()]);
  std::vector<Intervention> out{Intervention()};
  for (const auto& i : picked)
    if (!i.empty()) out.push_back(i);
  return out;
}

inline cak::InterventionMap restriction_map(const std::vector<Intervention>& list,
                                            const cak::Space& target) {
  std::vector<std::pair<Intervention, Intervention>> entries;
  for (const auto& i : list) entries.emplace_back(i, restrict_to(i, target));
  return cak::InterventionMap(entries);
}

struct Quad {
  CausalModel low;
  CausalModel high;
  cak::StateMap tau;
  cak::InterventionMap omega;
  std::vector<Intervention> list;
};

// Half unrelated random pairs with random τ and ω, half planted pairs where
// a compatible τ_U exists unless τ was perturbed afterwards.
inline Quad random_quad(std::mt19937_64& rng, std::size_t round) {
  for (;;) {
    CausalModel high = oracle::random_binary_model(rng, 1 + rng() % 2, 1 + rng() % 2);
    if (round % 2 == 0) {
      auto p = gen::planted(rng, high, "Z", false);
      auto list = gen::random_list(rng, p.low, 2);
      auto omega = gen::restriction_map(list, high.signature().states());
      cak::StateMap tau = p.tau;
      if (rng() % 3 == 0) {
        auto rows = tau.rows();
        auto& row = rows[rng() % rows.size()];
        row.second = high.signature().states().at(rng() % high.signature().states().count());
        tau = cak::StateMap(cak::VariableMap::from_table(tau.source(), tau.target(), rows));
      }
      auto image = omega.image();
      return {p.low.with_allowed(cak::AllowedInterventions::only(list)),
              high.with_allowed(cak::AllowedInterventions::only(image)), tau, omega, list};
    }
    CausalModel low = oracle::random_binary_model(rng, 1 + rng() % 3, 1 + rng() % 2);
    auto tau = oracle::random_state_map(rng, low.signature().states(),
                                        high.signature().states());
    auto list = gen::random_list(rng, low, 2);
    auto high_all = cak::enumerate_all(high);
    std::vector<std::pair<Intervention, Intervention>> entries;
    for (const auto& i : list)
      entries.emplace_back(i, i.empty() ? Intervention() : high_all[rng() % high_all.size()]);
    cak::InterventionMap omega(entries);
    auto image = omega.image();
    if (!cak::check_omega(omega, list, image).ok()) continue;
    return {low.with_allowed(cak::AllowedInterventions::only(list)),
            high.with_allowed(cak::AllowedInterventions::only(image)), tau, omega, list};
  }
}

}  // namespace gen
