#pragma once

// Brute-force reference implementations used to cross-check the library.
// They share only the data types with the code under test: expressions are
// interpreted by walking the tree, models are solved by fixpoint iteration,
// and every search is exhaustive.

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "cak/interventions.hpp"
#include "cak/maps.hpp"
#include "cak/prob.hpp"
#include "cak/scm.hpp"

namespace oracle {

using cak::Context;
using cak::EndoState;
using cak::Expression;
using cak::Intervention;
using cak::Value;

inline Value eval(const Expression& e, const std::map<std::string, Value>& env) {
  using K = Expression::Kind;
  using B = Expression::BinaryOp;
  switch (e.kind()) {
    case K::kLiteral:
      return e.literal_value();
    case K::kVariable:
      return env.at(e.variable_name());
    case K::kUnary: {
      Value v = eval(e.operands()[0], env);
      return e.unary_op() == Expression::UnaryOp::kNot ? !v : -v;
    }
    case K::kIte:
      return eval(e.operands()[0], env) ? eval(e.operands()[1], env)
                                        : eval(e.operands()[2], env);
    case K::kTable: {
      std::vector<Value> key;
      for (const auto& k : e.operands()) key.push_back(eval(k, env));
      auto it = e.table_data().rows.find(key);
      if (it != e.table_data().rows.end()) return it->second;
      return e.table_data().fallback.value();
    }
    case K::kBinary:
      break;
  }
  Value a = eval(e.operands()[0], env);
  Value b = eval(e.operands()[1], env);
  switch (e.binary_op()) {
    case B::kAdd: return a + b;
    case B::kSub: return a - b;
    case B::kMul: return a * b;
    case B::kEq: return a == b;
    case B::kNe: return a != b;
    case B::kLt: return a < b;
    case B::kLe: return a <= b;
    case B::kGt: return a > b;
    case B::kGe: return a >= b;
    case B::kAnd: return a && b;
    case B::kOr: return a || b;
  }
  return 0;
}

// Iterates all equations from an all-first-value start until nothing
// changes; for an acyclic model this reaches the unique solution within
// |V| rounds.
inline EndoState solve(const cak::CausalModel& m, const Context& u,
                       const Intervention& i) {
  const auto& exo = m.signature().exogenous();
  const auto& endo = m.signature().endogenous();
  std::map<std::string, Value> env;
  for (std::size_t k = 0; k < exo.size(); ++k) env[exo[k].name] = u.values[k];
  for (const auto& v : endo) env[v.name] = v.domain.front();
  for (std::size_t round = 0; round <= endo.size(); ++round) {
    for (std::size_t k = 0; k < endo.size(); ++k) {
      auto fixed = i.value(endo[k].name);
      env[endo[k].name] = fixed ? *fixed : eval(m.equations()[k], env);
    }
  }
  EndoState s;
  for (const auto& v : endo) s.values.push_back(env[v.name]);
  return s;
}

inline std::vector<Context> contexts(const cak::CausalModel& m) {
  std::vector<Context> out{Context{}};
  for (const auto& v : m.signature().exogenous()) {
    std::vector<Context> next;
    for (const auto& c : out)
      for (Value x : v.domain) {
        Context d = c;
        d.values.push_back(x);
        next.push_back(d);
      }
    out = next;
  }
  return out;
}

inline std::vector<EndoState> states(const std::vector<cak::VariableDecl>& vars) {
  std::vector<EndoState> out{EndoState{}};
  for (const auto& v : vars) {
    std::vector<EndoState> next;
    for (const auto& c : out)
      for (Value x : v.domain) {
        EndoState d = c;
        d.values.push_back(x);
        next.push_back(d);
      }
    out = next;
  }
  return out;
}

// All partial assignments, as the set of every subset/value combination.
inline std::set<Intervention> all_interventions(
    const std::vector<cak::VariableDecl>& vars) {
  std::vector<std::map<std::string, Value>> acc{{}};
  for (const auto& v : vars) {
    std::vector<std::map<std::string, Value>> next = acc;
    for (const auto& a : acc)
      for (Value x : v.domain) {
        auto b = a;
        b[v.name] = x;
        next.push_back(b);
      }
    acc = next;
  }
  std::set<Intervention> out;
  for (auto& a : acc) out.insert(Intervention(a));
  return out;
}

inline cak::StateDistribution state_distribution(
    const cak::CausalModel& m, const cak::RationalDistribution& d,
    const Intervention& i) {
  std::map<EndoState, cak::Rational> out;
  for (const auto& [u, p] : d.masses()) out[solve(m, u, i)] += p;
  return cak::StateDistribution(out);
}

// Joint response distributions agree on every pair of interventions.
inline bool formula_equivalent(const cak::CausalModel& m1,
                               const cak::RationalDistribution& d1,
                               const cak::CausalModel& m2,
                               const cak::RationalDistribution& d2) {
  auto all = all_interventions(m1.signature().endogenous());
  for (const auto& a : all) {
    for (const auto& b : all) {
      std::map<std::pair<EndoState, EndoState>, cak::Rational> j1, j2;
      for (const auto& [u, p] : d1.masses())
        j1[{solve(m1, u, a), solve(m1, u, b)}] += p;
      for (const auto& [u, p] : d2.masses())
        j2[{solve(m2, u, a), solve(m2, u, b)}] += p;
      if (j1 != j2) return false;
    }
  }
  return true;
}

// Each X_k is a random Boolean table over a random subset of the exogenous
// variables and X_1..X_{k-1}.
inline cak::CausalModel random_binary_model(std::mt19937_64& rng,
                                            std::size_t n_endo,
                                            std::size_t n_exo) {
  const std::vector<Value> bit{0, 1};
  std::vector<cak::VariableDecl> exo;
  for (std::size_t k = 1; k <= n_exo; ++k)
    exo.push_back({"U" + std::to_string(k), bit});
  std::vector<cak::EquationSpec> endo;
  std::vector<std::string> pool;
  for (const auto& u : exo) pool.push_back(u.name);
  for (std::size_t k = 1; k <= n_endo; ++k) {
    std::vector<std::string> keys;
    for (const auto& name : pool)
      if (rng() % 2) keys.push_back(name);
    std::string eq;
    if (keys.empty()) {
      eq = std::to_string(rng() % 2);
    } else {
      eq = "table(";
      for (std::size_t j = 0; j < keys.size(); ++j) eq += (j ? ", " : "") + keys[j];
      eq += ")[";
      for (std::size_t row = 0; row < (std::size_t{1} << keys.size()); ++row) {
        eq += row ? ", (" : "(";
        for (std::size_t j = 0; j < keys.size(); ++j)
          eq += (j ? "," : "") + std::to_string((row >> (keys.size() - 1 - j)) & 1);
        eq += ")->" + std::to_string(rng() % 2);
      }
      eq += "]";
    }
    std::string name = "X" + std::to_string(k);
    endo.push_back({name, bit, eq});
    pool.push_back(name);
  }
  return cak::make_model(exo, endo);
}

// Total assignments agreeing with a partial one.
inline std::set<EndoState> rst(const std::vector<cak::VariableDecl>& vars,
                               const Intervention& i) {
  std::set<EndoState> out;
  for (const auto& s : states(vars)) {
    bool ok = true;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      auto v = i.value(vars[k].name);
      ok = ok && (!v || *v == s.values[k]);
    }
    if (ok) out.insert(s);
  }
  return out;
}

// Every high intervention whose restriction set is τ's image of the low
// one's, found by trying them all.
inline std::vector<Intervention> omega_tau_all(const cak::StateMap& tau,
                                               const Intervention& i) {
  std::set<EndoState> image;
  for (const auto& s : rst(tau.source().variables(), i)) image.insert(tau(s));
  std::vector<Intervention> out;
  for (const auto& y : all_interventions(tau.target().variables()))
    if (rst(tau.target().variables(), y) == image) out.push_back(y);
  return out;
}

inline std::optional<Intervention> omega_tau(const cak::StateMap& tau,
                                             const Intervention& i) {
  auto all = omega_tau_all(tau, i);
  if (all.empty()) return std::nullopt;
  return all.front();
}

// High contexts h with τ(M_L(u, i)) = M_H(h, ω(i)) for every listed i.
inline std::vector<Context> correspondents(const cak::CausalModel& low,
                                           const cak::CausalModel& high,
                                           const cak::StateMap& tau,
                                           const cak::InterventionMap& omega,
                                           const std::vector<Intervention>& list,
                                           const Context& u) {
  std::vector<Context> out;
  for (const auto& h : contexts(high)) {
    bool ok = true;
    for (const auto& i : list)
      ok = ok && tau(solve(low, u, i)) == solve(high, h, omega.at(i));
    if (ok) out.push_back(h);
  }
  return out;
}

inline bool compatible_exists(const cak::CausalModel& low,
                              const cak::CausalModel& high,
                              const cak::StateMap& tau,
                              const cak::InterventionMap& omega,
                              const std::vector<Intervention>& list) {
  for (const auto& u : contexts(low))
    if (correspondents(low, high, tau, omega, list, u).empty()) return false;
  return true;
}

// Hall's condition over every set of high contexts; nullopt when there are
// more than 16 of them.
inline std::optional<bool> surjective_compatible_exists(
    const cak::CausalModel& low, const cak::CausalModel& high,
    const cak::StateMap& tau, const cak::InterventionMap& omega,
    const std::vector<Intervention>& list) {
  auto highs = contexts(high);
  if (highs.size() > 16) return std::nullopt;
  std::vector<unsigned> reach;  // bitmask of correspondents per low context
  for (const auto& u : contexts(low)) {
    unsigned mask = 0;
    for (const auto& h : correspondents(low, high, tau, omega, list, u))
      mask |= 1u << (std::find(highs.begin(), highs.end(), h) - highs.begin());
    if (mask == 0) return false;
    reach.push_back(mask);
  }
  for (unsigned subset = 1; subset < (1u << highs.size()); ++subset) {
    std::size_t neighbours = 0;
    for (unsigned m : reach) neighbours += (m & subset) != 0;
    if (neighbours < static_cast<std::size_t>(__builtin_popcount(subset)))
      return false;
  }
  return true;
}

inline bool exact(const cak::CausalModel& low, const cak::RationalDistribution& dl,
                  const cak::CausalModel& high, const cak::RationalDistribution& dh,
                  const cak::StateMap& tau, const cak::InterventionMap& omega,
                  const std::vector<Intervention>& list) {
  for (const auto& i : list) {
    std::map<EndoState, cak::Rational> pushed;
    auto before = state_distribution(low, dl, i);
    for (const auto& [s, p] : before.masses()) pushed[tau(s)] += p;
    if (cak::StateDistribution(pushed) != state_distribution(high, dh, omega.at(i)))
      return false;
  }
  return true;
}

// The τ-abstraction conditions taken one by one from their statement.
inline std::optional<bool> tau_abstraction(const cak::CausalModel& low,
                                           const cak::CausalModel& high,
                                           const cak::StateMap& tau) {
  std::set<EndoState> image;
  for (const auto& s : states(low.signature().endogenous())) image.insert(tau(s));
  if (image.size() != states(high.signature().endogenous()).size()) return false;
  auto low_list = low.allowed_interventions();
  std::vector<std::pair<Intervention, Intervention>> entries;
  std::set<Intervention> induced;
  for (const auto& i : low_list) {
    auto h = omega_tau(tau, i);
    if (!h) return false;
    entries.emplace_back(i, *h);
    induced.insert(*h);
  }
  auto high_list = high.allowed_interventions();
  cak::InterventionMap omega(entries);
  auto surjective = surjective_compatible_exists(low, high, tau, omega, low_list);
  if (!surjective) return std::nullopt;
  if (!*surjective) return false;
  return induced == std::set<Intervention>(high_list.begin(), high_list.end());
}

// Every high intervention is ω_τ of some low one, and the τ-abstraction
// holds on the induced sets.
inline std::optional<bool> strong_abstraction(const cak::CausalModel& low,
                                              const cak::CausalModel& high,
                                              const cak::StateMap& tau) {
  std::vector<Intervention> low_list;
  std::set<Intervention> induced;
  for (const auto& i : all_interventions(low.signature().endogenous())) {
    if (auto h = omega_tau(tau, i)) {
      low_list.push_back(i);
      induced.insert(*h);
    }
  }
  if (induced != all_interventions(high.signature().endogenous())) return false;
  return tau_abstraction(
      low.with_allowed(cak::AllowedInterventions::only(low_list)),
      high.with_allowed(cak::AllowedInterventions::only(
          std::vector<Intervention>(induced.begin(), induced.end()))),
      tau);
}

inline cak::StateMap random_state_map(std::mt19937_64& rng, const cak::Space& from,
                                      const cak::Space& to) {
  return cak::StateMap(cak::VariableMap::from_function(
      from, to, [&](std::span<const Value>) { return to.at(rng() % to.count()); }));
}

}  // namespace oracle
