#include "cak/prob.hpp"

#include <set>
#include <sstream>

#include "cak/interventions.hpp"

namespace cak {

std::string to_string(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

Rational parse_rational(std::string_view text) {
  using boost::multiprecision::cpp_int;
  auto parse_int = [&](std::string_view s) {
    std::string digits(s);
    std::size_t start = !digits.empty() && digits[0] == '-' ? 1 : 0;
    if (digits.size() == start ||
        digits.find_first_not_of("0123456789", start) != std::string::npos) {
      throw InputError("bad probability '" + std::string(text) + "'");
    }
    return cpp_int(digits);
  };
  std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  cpp_int den = parse_int(text.substr(slash + 1));
  if (den == 0) {
    throw InputError("zero denominator in '" + std::string(text) + "'");
  }
  return Rational(parse_int(text.substr(0, slash)), den);
}

void require_distribution(const CausalModel& model,
                          const RationalDistribution& d) {
  for (const auto& [context, p] : d.masses()) require_context(model, context);
}

RationalDistribution uniform_distribution(const Space& contexts,
                                          const Limits& limits) {
  contexts.require_at_most(limits.max_contexts, "context space");
  std::map<Context, Rational> masses;
  Rational each(1, static_cast<long long>(contexts.count()));
  std::vector<Value> a = contexts.first();
  do {
    masses.emplace(Context{a}, each);
  } while (contexts.advance(a));
  return RationalDistribution(std::move(masses));
}

RationalDistribution random_distribution(const Space& contexts,
                                         std::mt19937_64& rng,
                                         std::uint64_t denominator) {
  if (denominator == 0) throw InputError("denominator must be positive");
  std::map<Context, Rational> masses;
  Rational unit(1, static_cast<long long>(denominator));
  for (std::uint64_t k = 0; k < denominator; ++k) {
    std::size_t index = rng() % contexts.count();
    masses[Context{contexts.at(index)}] += unit;
  }
  return RationalDistribution(std::move(masses));
}

StateDistribution push_to_states(const CausalModel& model,
                                 const RationalDistribution& d) {
  return interventional_dist(model, d, Intervention());
}

StateDistribution interventional_dist(const CausalModel& model,
                                      const RationalDistribution& d,
                                      const Intervention& i) {
  require_distribution(model, d);
  Overrides overrides = model.overrides_for(i);
  return pushforward<EndoState>(
      d, [&](const Context& u) { return model.solve(u, overrides); });
}

StateDistribution tau_pushforward(const StateMap& tau,
                                  const StateDistribution& sd) {
  return pushforward<EndoState>(sd, tau);
}

RationalDistribution context_pushforward(const ContextMap& tau_u,
                                         const RationalDistribution& d) {
  return pushforward<Context>(d, tau_u);
}

namespace {

using Profile = std::vector<EndoState>;

std::map<Profile, Rational> profile_masses(
    const CausalModel& model, const RationalDistribution& d,
    const std::vector<Overrides>& overrides) {
  std::map<Profile, Rational> out;
  for (const auto& [u, p] : d.masses()) {
    Profile profile;
    profile.reserve(overrides.size());
    for (const auto& o : overrides) profile.push_back(model.solve(u, o));
    out[std::move(profile)] += p;
  }
  return out;
}

}  // namespace

EquivalenceReport equivalent(
    const CausalModel& m1, const RationalDistribution& d1,
    const CausalModel& m2, const RationalDistribution& d2,
    const std::optional<std::vector<Intervention>>& interventions,
    const Limits& limits) {
  require_same_variables(m1.signature().endogenous(),
                         m2.signature().endogenous(),
                         "models to compare have different endogenous variables");
  require_distribution(m1, d1);
  require_distribution(m2, d2);

  EquivalenceReport report;
  auto allowed1 = m1.allowed_interventions(limits);
  auto allowed2 = m2.allowed_interventions(limits);
  if (std::set<Intervention>(allowed1.begin(), allowed1.end()) !=
      std::set<Intervention>(allowed2.begin(), allowed2.end())) {
    report.reason = "the models allow different interventions";
    return report;
  }

  std::vector<Intervention> list =
      interventions ? *interventions : enumerate_all(m1, limits);
  std::vector<Overrides> o1, o2;
  for (const auto& i : list) {
    o1.push_back(m1.overrides_for(i));
    o2.push_back(m2.overrides_for(i));
  }
  if (profile_masses(m1, d1, o1) == profile_masses(m2, d2, o2)) {
    report.holds = true;
    return report;
  }

  for (std::size_t k = 0; k < list.size(); ++k) {
    auto first = pushforward<EndoState>(
        d1, [&](const Context& u) { return m1.solve(u, o1[k]); });
    auto second = pushforward<EndoState>(
        d2, [&](const Context& u) { return m2.solve(u, o2[k]); });
    if (first == second) continue;
    // Prefer a state that only one model can produce.
    std::optional<EndoState> witness;
    auto consider = [&](const StateDistribution& a, const StateDistribution& b) {
      for (const auto& [s, p] : a.masses()) {
        if (b.mass(s) == 0 && (!witness || s < *witness)) witness = s;
      }
    };
    consider(first, second);
    consider(second, first);
    if (!witness) {
      for (const auto& [s, p] : first.masses()) {
        if (second.mass(s) != p) {
          witness = s;
          break;
        }
      }
    }
    report.intervention = list[k];
    report.state = *witness;
    report.first_mass = first.mass(*witness);
    report.second_mass = second.mass(*witness);
    report.reason = "under {" + list[k].to_string() + "} the state " +
                    describe(m1, *witness) + " has probability " +
                    to_string(report.first_mass) + " in the first model and " +
                    to_string(report.second_mass) + " in the second";
    return report;
  }
  report.reason =
      "every single intervention agrees, but the joint distributions of "
      "responses across interventions differ";
  return report;
}

std::pair<CausalModel, RationalDistribution> to_uev(
    const CausalModel& model, const RationalDistribution& d,
    const Limits& limits) {
  require_valid(model, limits);
  require_distribution(model, d);
  const Space& contexts = model.signature().contexts();
  contexts.require_at_most(limits.max_contexts, "context space");
  const std::size_t n = contexts.count();
  const auto& exo = model.signature().exogenous();
  const auto& endo = model.signature().endogenous();

  std::set<std::string> taken;
  for (const auto& v : endo) taken.insert(v.name);
  std::vector<Value> codes(n);
  for (std::size_t c = 0; c < n; ++c) codes[c] = static_cast<Value>(c);

  std::vector<VariableDecl> fresh;
  std::vector<Expression> equations;
  for (std::size_t y = 0; y < endo.size(); ++y) {
    std::string name = "U_" + endo[y].name;
    for (int suffix = 2; taken.count(name); ++suffix)
      name = "U_" + endo[y].name + "_" + std::to_string(suffix);
    taken.insert(name);
    fresh.push_back({name, codes});

    // Each original exogenous variable becomes a lookup on the code.
    std::map<std::string, Expression> replacements;
    std::set<std::string> mentioned = model.equations()[y].variables();
    for (std::size_t k = 0; k < exo.size(); ++k) {
      if (!mentioned.count(exo[k].name)) continue;
      Expression::Table table;
      for (std::size_t c = 0; c < n; ++c)
        table.rows.emplace(std::vector<Value>{codes[c]}, contexts.at(c)[k]);
      replacements.emplace(
          exo[k].name,
          Expression::table({Expression::variable(name)}, std::move(table)));
    }
    equations.push_back(model.equations()[y].substitute(replacements));
  }

  CausalModel out(Signature(fresh, endo), std::move(equations),
                  model.allowed());
  std::map<Context, Rational> masses;
  for (const auto& [u, p] : d.masses()) {
    Value code = static_cast<Value>(contexts.index_of(u.values));
    masses.emplace(Context{std::vector<Value>(endo.size(), code)}, p);
  }
  return {std::move(out), RationalDistribution(std::move(masses))};
}

std::string describe(const CausalModel& model, const RationalDistribution& d) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [u, p] : d.masses()) {
    os << (first ? "" : "; ") << describe(model, u) << ": " << to_string(p);
    first = false;
  }
  return os.str();
}

std::string describe(const CausalModel& model, const StateDistribution& d) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [s, p] : d.masses()) {
    os << (first ? "" : "; ") << describe(model, s) << ": " << to_string(p);
    first = false;
  }
  return os.str();
}

}  // namespace cak
