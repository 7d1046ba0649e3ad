#include "cak/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <random>

#include "cak/errors.hpp"

namespace cak {

namespace {

using Values = std::vector<Value>;

Values range(Value lo, Value hi) {
  Values out;
  for (Value v = lo; v <= hi; ++v) out.push_back(v);
  return out;
}

Expression var(const std::string& name) { return Expression::variable(name); }

Expression table(const std::vector<std::string>& keys,
                 std::map<Values, Value> rows) {
  std::vector<Expression> k;
  for (const auto& name : keys) k.push_back(var(name));
  return Expression::table(std::move(k), {std::move(rows), std::nullopt});
}

// Every total assignment over `decls`, first variable most significant.
std::vector<Values> assignments(const std::vector<VariableDecl>& decls) {
  Space space(decls);
  std::vector<Values> out;
  Values a = space.first();
  do {
    out.push_back(a);
  } while (space.advance(a));
  return out;
}

StateMap tau_from(const CausalModel& low, const CausalModel& high,
                  const std::function<Values(std::span<const Value>)>& f) {
  return StateMap(VariableMap::from_function(low.signature().states(),
                                             high.signature().states(), f));
}

ContextMap tau_u_from(const CausalModel& low, const CausalModel& high,
                      const std::function<Values(std::span<const Value>)>& f) {
  return ContextMap(VariableMap::from_function(low.signature().contexts(),
                                               high.signature().contexts(), f));
}

InterventionMap omega_from(const std::vector<Intervention>& domain,
                           const std::function<Intervention(const Intervention&)>& f) {
  std::vector<std::pair<Intervention, Intervention>> entries;
  for (const auto& i : domain) entries.emplace_back(i, f(i));
  return InterventionMap(std::move(entries));
}

// ω_τ on every allowed low intervention; throws if it is undefined somewhere.
InterventionMap omega_tau_on(const CausalModel& low, const StateMap& tau) {
  return omega_from(low.allowed_interventions(), [&](const Intervention& i) {
    auto h = derive_omega_tau(tau, i);
    if (!h) throw InputError("ω_τ is undefined on {" + i.to_string() + "}");
    return *h;
  });
}

Expectation stated(bool holds, std::string disagreement = {}) {
  return {holds, false, std::move(disagreement)};
}
Expectation derived(bool holds) { return {holds, true, {}}; }

Intervention assign(std::initializer_list<std::pair<const std::string, Value>> a) {
  return Intervention(std::map<std::string, Value>(a));
}

}  // namespace

std::pair<ExampleBundle, ExampleBundle> build_example3() {
  auto only_empty = AllowedInterventions::only({Intervention()});
  CausalModel m1 = make_model({{"U", {0, 1}}}, {{"X", {0, 1}, "U"}}, only_empty);
  CausalModel m2 = make_model({{"W", {0, 1}}}, {{"Y", {0, 1}, "1 - W"}}, only_empty);
  auto d1 = RationalDistribution::point(Context{{0}});
  auto d2 = RationalDistribution::point(Context{{0}});
  auto omega = InterventionMap::identity({Intervention()});
  const std::string disagreement =
      "the example calls this pair not uniform, but with only the empty "
      "intervention the constant τ_U onto the context producing τ's value "
      "is compatible";

  ExampleBundle forward{
      "example3",
      "X = U against Y = 1 - W, empty intervention only, constant τ onto Y = 1",
      m1, m2, tau_from(m1, m2, [](std::span<const Value>) { return Values{1}; }),
      omega, d1, d2, std::nullopt,
      {{"exact", stated(true)},
       {"uniform", stated(true, disagreement)},
       {"abstraction", derived(false)}}};
  ExampleBundle backward{
      "example3-reverse",
      "Y = 1 - W against X = U, empty intervention only, constant τ onto X = 0",
      m2, m1, tau_from(m2, m1, [](std::span<const Value>) { return Values{0}; }),
      omega, d2, d1, std::nullopt,
      {{"exact", stated(true)},
       {"uniform", stated(true, disagreement)},
       {"abstraction", derived(false)}}};
  return {std::move(forward), std::move(backward)};
}

ExampleBundle build_example4(Example4Omega which) {
  std::vector<VariableDecl> exo{{"U1", {0, 1}}, {"U2", {0, 1}}};
  std::vector<Intervention> i1{assign({{"X1", 0}}), assign({{"X1", 1}})};
  std::vector<Intervention> i2{assign({{"X1", 0}, {"X2", 0}}),
                               assign({{"X1", 1}, {"X2", 1}})};
  CausalModel chain = make_model(exo, {{"X1", {0, 1}, "U1"}, {"X2", {0, 1}, "X1"}},
                                 AllowedInterventions::only(i1));
  CausalModel loose = make_model(exo, {{"X1", {0, 1}, "U1"}, {"X2", {0, 1}, "U2"}},
                                 AllowedInterventions::only(i2));
  auto identity = [](std::span<const Value> v) { return Values(v.begin(), v.end()); };

  switch (which) {
    case Example4Omega::kForward:
      return {"example4",
              "X2 = X1 against independent X2 = U2, ω sending X1<-x to both set to x",
              chain, loose, tau_from(chain, loose, identity),
              InterventionMap({{i1[0], i2[0]}, {i1[1], i2[1]}}),
              std::nullopt, std::nullopt, std::nullopt,
              {{"uniform", stated(true)},
               {"abstraction", stated(false)},
               {"strong", derived(false)}}};
    case Example4Omega::kBackward:
      return {"example4-reverse",
              "independent X2 = U2 against X2 = X1, ω sending both set to x back to X1<-x",
              loose, chain, tau_from(loose, chain, identity),
              InterventionMap({{i2[0], i1[0]}, {i2[1], i1[1]}}),
              std::nullopt, std::nullopt, std::nullopt,
              {{"uniform", stated(true)},
               {"abstraction", derived(false)},
               {"strong", derived(false)}}};
    case Example4Omega::kIdentity:
      break;
  }
  CausalModel high = loose.with_allowed(AllowedInterventions::only(i1));
  return {"example4-identity",
          "X2 = X1 against independent X2 = U2, identity ω on X1<-x",
          chain, high, tau_from(chain, high, identity),
          InterventionMap::identity(i1),
          std::nullopt, std::nullopt, std::nullopt,
          {{"uniform", stated(false)},
           {"abstraction", stated(false)},
           {"strong", derived(false)}}};
}

CausalModel copy_model(int n) {
  std::vector<VariableDecl> exo;
  std::vector<EquationSpec> endo;
  for (int k = 1; k <= n; ++k) {
    exo.push_back({"U" + std::to_string(k), {0, 1}});
    endo.push_back({"X" + std::to_string(k), {0, 1}, "U" + std::to_string(k)});
  }
  return make_model(exo, endo);
}

ExampleBundle build_example5_xstar(const CausalModel& base,
                                   std::optional<std::uint64_t> seed) {
  require_valid(base);
  const auto& sig = base.signature();
  std::vector<VariableDecl> exo = sig.exogenous();
  std::vector<VariableDecl> endo = sig.endogenous();
  std::map<std::string, const VariableDecl*> decl_of;
  for (const auto& d : exo) decl_of[d.name] = &d;
  for (const auto& d : endo) decl_of[d.name] = &d;
  if (decl_of.count("Xstar") || decl_of.count("Ustar"))
    throw InputError("the base model already uses the name Xstar or Ustar");

  std::mt19937_64 rng(seed.value_or(0));
  std::vector<Expression> equations;
  for (std::size_t k = 0; k < endo.size(); ++k) {
    const Expression& original = base.equations()[k];
    const Values& domain = endo[k].domain;
    Expression other = Expression::literal(domain.front());
    if (seed) {
      auto mentioned = original.variables();
      std::vector<std::string> keys(mentioned.begin(), mentioned.end());
      std::vector<VariableDecl> key_decls;
      for (const auto& name : keys) key_decls.push_back(*decl_of.at(name));
      std::map<Values, Value> rows;
      for (auto& a : assignments(key_decls))
        rows[std::move(a)] = domain[rng() % domain.size()];
      other = keys.empty() ? Expression::literal(rows.begin()->second)
                           : table(keys, std::move(rows));
    }
    equations.push_back(Expression::ite(
        Expression::binary(Expression::BinaryOp::kEq, var("Xstar"),
                           Expression::literal(1)),
        original, other));
  }
  exo.push_back({"Ustar", {0, 1}});
  endo.push_back({"Xstar", {0, 1}});
  equations.push_back(var("Ustar"));

  auto low_list = base.allowed_interventions();
  CausalModel low = base.with_allowed(AllowedInterventions::only(low_list));
  CausalModel high(Signature(exo, endo), std::move(equations),
                   AllowedInterventions::only(low_list));
  auto with_one = [](std::span<const Value> v) {
    Values out(v.begin(), v.end());
    out.push_back(1);
    return out;
  };
  StateMap tau = tau_from(low, high, with_one);
  auto low_dist = uniform_distribution(low.signature().contexts());
  auto high_dist = context_pushforward(tau_u_from(low, high, with_one), low_dist);
  std::string name = seed ? "xstar-random" : "xstar";
  std::string description =
      "a model against its copy with a switch X* that, when off, replaces every "
      "equation by " +
      std::string(seed ? "a seeded random table" : "the first domain value");
  return {std::move(name), std::move(description), low, high, std::move(tau),
          InterventionMap::identity(low_list), low_dist, high_dist, std::nullopt,
          {{"exact", derived(true)},
           {"uniform", stated(true)},
           {"abstraction", stated(false)},
           {"strong", derived(false)}}};
}

ExampleBundle build_pixel(int n, PixelVariant variant) {
  if (n < 2 || n % 2 != 0) throw InputError("the pixel grid side must be even and at least 2");
  const int half = n / 2;
  auto pixel = [](int r, int c) {
    return "X" + std::to_string(r) + std::to_string(c);
  };
  if (n > 8) throw InputError("the pixel grid side must be at most 8");

  std::vector<VariableDecl> low_exo;
  std::vector<EquationSpec> low_endo;
  std::vector<std::string> counted, rest;
  std::vector<std::size_t> upper, left;  // positions among the pixels
  for (int r = 1; r <= n; ++r) {
    for (int c = 1; c <= n; ++c) {
      std::string u = "U" + std::to_string(r) + std::to_string(c);
      std::size_t pos = low_endo.size();
      low_exo.push_back({u, {0, 1}});
      low_endo.push_back({pixel(r, c), {0, 1}, u});
      if (r <= half) upper.push_back(pos);
      if (c <= half) left.push_back(pos);
      (r <= half || c <= half ? counted : rest).push_back(pixel(r, c));
    }
  }

  // Empty intervention, plus every setting of the counted pixels combined
  // with any partial setting of the rest.
  std::vector<Intervention> restricted{Intervention()};
  {
    std::vector<VariableDecl> fixed, optional;
    for (const auto& x : counted) fixed.push_back({x, {0, 1}});
    for (const auto& x : rest) optional.push_back({x, {-1, 0, 1}});
    for (const auto& a : assignments(fixed)) {
      for (const auto& b : assignments(optional)) {
        std::map<std::string, Value> m;
        for (std::size_t k = 0; k < a.size(); ++k) m[counted[k]] = a[k];
        for (std::size_t k = 0; k < b.size(); ++k)
          if (b[k] >= 0) m[rest[k]] = b[k];
        restricted.emplace_back(std::move(m));
      }
    }
  }
  CausalModel low = make_model(low_exo, low_endo, AllowedInterventions::only(restricted));
  auto count = [](std::span<const Value> v, const std::vector<std::size_t>& cells) {
    Value s = 0;
    for (std::size_t p : cells) s += v[p];
    return s;
  };
  const Value half_count = half * n;
  const Value union_count = static_cast<Value>(counted.size());

  if (variant == PixelVariant::kMerged) {
    std::vector<Intervention> high_list{Intervention()};
    for (Value m = 0; m <= union_count; ++m) high_list.push_back(assign({{"ULH", m}}));
    CausalModel high = make_model({{"W", range(0, union_count)}},
                                  {{"ULH", range(0, union_count), "W"}},
                                  AllowedInterventions::only(high_list));
    std::vector<std::size_t> all_counted;
    for (std::size_t p = 0; p < low_endo.size(); ++p) {
      if (std::find(counted.begin(), counted.end(), low_endo[p].name) != counted.end())
        all_counted.push_back(p);
    }
    StateMap tau = tau_from(low, high, [&](std::span<const Value> v) {
      return Values{count(v, all_counted)};
    });
    Partition partition{{{"ULH", counted}}, rest};
    auto omega = omega_from(restricted, [&](const Intervention& i) {
      if (i.empty()) return Intervention();
      Value s = 0;
      for (const auto& x : counted) s += *i.value(x);
      return assign({{"ULH", s}});
    });
    return {"pixel-" + std::to_string(n) + "-merged",
            "binary pixel grid against one count of the upper and left halves together",
            low, high, std::move(tau), std::move(omega),
            std::nullopt, std::nullopt, std::move(partition),
            {{"uniform", derived(true)},
             {"abstraction", derived(true)},
             {"strong", stated(true)},
             {"constructive", derived(true)}}};
  }

  // The exogenous W ranges over count pairs that some grid realizes.
  std::vector<std::pair<Value, Value>> pairs;
  for (Value m = 0; m <= half_count; ++m)
    for (Value k = 0; k <= half_count; ++k)
      if (std::abs(m - k) <= half_count - half * half) pairs.emplace_back(m, k);
  std::map<Values, Value> uh_rows, lh_rows;
  std::vector<Intervention> high_list{Intervention()};
  for (std::size_t w = 0; w < pairs.size(); ++w) {
    uh_rows[{static_cast<Value>(w)}] = pairs[w].first;
    lh_rows[{static_cast<Value>(w)}] = pairs[w].second;
    high_list.push_back(assign({{"UH", pairs[w].first}, {"LH", pairs[w].second}}));
  }
  CausalModel high(
      Signature({{"W", range(0, static_cast<Value>(pairs.size()) - 1)}},
                {{"UH", range(0, half_count)}, {"LH", range(0, half_count)}}),
      {table({"W"}, uh_rows), table({"W"}, lh_rows)},
      AllowedInterventions::only(high_list));
  StateMap tau = tau_from(low, high, [&](std::span<const Value> v) {
    return Values{count(v, upper), count(v, left)};
  });
  auto omega = omega_from(restricted, [&](const Intervention& i) {
    if (i.empty()) return Intervention();
    Values v;
    for (const auto& d : low.signature().endogenous()) v.push_back(i.value(d.name).value_or(0));
    return assign({{"UH", count(v, upper)}, {"LH", count(v, left)}});
  });
  return {"pixel-" + std::to_string(n),
          "binary pixel grid against separate counts of the upper and left halves",
          low, high, std::move(tau), std::move(omega),
          std::nullopt, std::nullopt, std::nullopt,
          {{"uniform", derived(true)},
           {"abstraction",
            stated(false,
                   "the example calls this a τ-abstraction under the restricted "
                   "interventions, but τ misses count pairs such as UH = 0, LH = " +
                       std::to_string(half_count) +
                       ", so the surjectivity requirement fails")},
           {"strong", stated(false)}}};
}

std::pair<ExampleBundle, ExampleBundle> build_appendix_example() {
  CausalModel m1 = copy_model(3);
  CausalModel m2 = make_model({{"W1", {0, 1}}, {"W2", {0, 1}}},
                              {{"Y1", {0, 1}, "W1"}, {"Y2", {0, 1}, "W2"}});
  StateMap tau = tau_from(m1, m2, [](std::span<const Value> v) {
    return Values{v[0] | v[2], v[1] | v[2]};
  });

  auto induced = compute_induced_sets(m1, m2, tau);
  CausalModel low_a = m1.with_allowed(AllowedInterventions::only(induced.low));
  std::vector<Intervention> with_x3_off;
  for (const auto& i : enumerate_all(m1))
    if (i.value("X3") == Value{0}) with_x3_off.push_back(i);
  CausalModel low_b = m1.with_allowed(AllowedInterventions::only(with_x3_off));

  ExampleBundle a{"appendix",
                  "three copies against two, τ = (x1 or x3, x2 or x3), on the "
                  "interventions where ω_τ is defined",
                  low_a, m2, tau, omega_tau_on(low_a, tau),
                  std::nullopt, std::nullopt, std::nullopt,
                  {{"uniform", derived(false)},
                   {"abstraction", stated(false)},
                   {"strong", derived(false)}}};
  ExampleBundle b{"appendix-x3",
                  "three copies against two, τ = (x1 or x3, x2 or x3), on the "
                  "interventions that set X3 to 0",
                  low_b, m2, tau, omega_tau_on(low_b, tau),
                  std::nullopt, std::nullopt, std::nullopt,
                  {{"uniform", derived(true)},
                   {"abstraction", stated(true)},
                   {"strong", derived(false)}}};
  return {std::move(a), std::move(b)};
}

ExampleBundle build_voting(int n_voters, int n_groups, int n_ads) {
  if (n_voters < 1 || n_groups < 1 || n_ads < 0 || n_voters % n_groups != 0)
    throw InputError("voters must split evenly into at least one group");
  if (n_ads > 3) throw InputError("at most 3 ads are supported");
  const Value configs = Value{1} << n_ads;
  const Value group_size = n_voters / n_groups;
  const Value responses = Value{1} << configs;
  Value high_responses = 1;
  for (Value c = 0; c < configs; ++c) high_responses *= group_size + 1;

  std::vector<std::string> ads;
  for (int j = 1; j <= n_ads; ++j) ads.push_back("A" + std::to_string(j));
  std::vector<VariableDecl> ad_decls;
  for (const auto& a : ads) ad_decls.push_back({a, {0, 1}});
  // Ad configurations in index order, A1 most significant.
  auto configurations = assignments(ad_decls);

  // Low: X_i reads bit c of U_i under ad configuration c.
  std::vector<VariableDecl> low_exo, low_endo;
  std::vector<Expression> low_eqs;
  std::vector<std::string> voter_keys;
  for (int i = 1; i <= n_voters; ++i) {
    std::string u = "U" + std::to_string(i);
    low_exo.push_back({u, range(0, responses - 1)});
    std::map<Values, Value> rows;
    for (Value f = 0; f < responses; ++f) {
      for (Value c = 0; c < configs; ++c) {
        Values key{f};
        key.insert(key.end(), configurations[c].begin(), configurations[c].end());
        rows[key] = (f >> c) & 1;
      }
    }
    std::vector<std::string> keys{u};
    keys.insert(keys.end(), ads.begin(), ads.end());
    low_endo.push_back({"X" + std::to_string(i), {0, 1}});
    low_eqs.push_back(table(keys, std::move(rows)));
  }
  for (const auto& a : ads) {
    low_exo.push_back({"U" + a, {0, 1}});
    low_endo.push_back({a, {0, 1}});
    low_eqs.push_back(var("U" + a));
  }
  {
    Expression total = var("X1");
    for (int i = 2; i <= n_voters; ++i)
      total = Expression::binary(Expression::BinaryOp::kAdd, total,
                                 var("X" + std::to_string(i)));
    low_endo.push_back({"T", range(0, n_voters)});
    low_eqs.push_back(total);
  }

  // High: G_j reads base-(size+1) digit c of V_j under ad configuration c.
  std::vector<VariableDecl> high_exo, high_endo;
  std::vector<Expression> high_eqs;
  for (int j = 1; j <= n_groups; ++j) {
    std::string v = "V" + std::to_string(j);
    high_exo.push_back({v, range(0, high_responses - 1)});
    std::map<Values, Value> rows;
    for (Value f = 0; f < high_responses; ++f) {
      Value rest = f;
      for (Value c = 0; c < configs; ++c) {
        Values key{f};
        key.insert(key.end(), configurations[c].begin(), configurations[c].end());
        rows[key] = rest % (group_size + 1);
        rest /= group_size + 1;
      }
    }
    std::vector<std::string> keys{v};
    keys.insert(keys.end(), ads.begin(), ads.end());
    high_endo.push_back({"G" + std::to_string(j), range(0, group_size)});
    high_eqs.push_back(table(keys, std::move(rows)));
  }
  for (const auto& a : ads) {
    high_exo.push_back({"V" + a, {0, 1}});
    high_endo.push_back({a, {0, 1}});
    high_eqs.push_back(var("V" + a));
  }
  {
    Expression total = var("G1");
    for (int j = 2; j <= n_groups; ++j)
      total = Expression::binary(Expression::BinaryOp::kAdd, total,
                                 var("G" + std::to_string(j)));
    high_endo.push_back({"Win", {0, 1}});
    high_eqs.push_back(Expression::binary(
        Expression::BinaryOp::kGt,
        Expression::binary(Expression::BinaryOp::kMul, Expression::literal(2), total),
        Expression::literal(n_voters)));
  }

  std::vector<Intervention> ad_only{Intervention()};
  {
    std::vector<VariableDecl> optional;
    for (const auto& a : ads) optional.push_back({a, {-1, 0, 1}});
    for (const auto& b : assignments(optional)) {
      std::map<std::string, Value> m;
      for (std::size_t k = 0; k < b.size(); ++k)
        if (b[k] >= 0) m[ads[k]] = b[k];
      if (!m.empty()) ad_only.emplace_back(std::move(m));
    }
  }
  auto allowed = AllowedInterventions::only(ad_only);
  CausalModel low(Signature(low_exo, low_endo), std::move(low_eqs), allowed);
  CausalModel high(Signature(high_exo, high_endo), std::move(high_eqs), allowed);

  StateMap tau = tau_from(low, high, [&](std::span<const Value> v) {
    Values out;
    for (Value j = 0; j < n_groups; ++j) {
      Value s = 0;
      for (Value i = 0; i < group_size; ++i) s += v[j * group_size + i];
      out.push_back(s);
    }
    for (int a = 0; a < n_ads; ++a) out.push_back(v[n_voters + a]);
    out.push_back(2 * v.back() > n_voters ? 1 : 0);
    return out;
  });

  Partition partition;
  for (Value j = 0; j < n_groups; ++j) {
    std::vector<std::string> cell;
    for (Value i = 0; i < group_size; ++i)
      cell.push_back("X" + std::to_string(j * group_size + i + 1));
    partition.cells.emplace_back("G" + std::to_string(j + 1), std::move(cell));
  }
  for (const auto& a : ads) partition.cells.emplace_back(a, std::vector<std::string>{a});
  partition.cells.emplace_back("Win", std::vector<std::string>{"T"});

  return {"voting-" + std::to_string(n_voters) + "-" + std::to_string(n_groups) +
              "-" + std::to_string(n_ads),
          "voters responding to ads, with a total, against group sums and a "
          "strict-majority winner",
          low, high, std::move(tau), InterventionMap::identity(ad_only),
          std::nullopt, std::nullopt, std::move(partition),
          {{"uniform", derived(true)},
           {"abstraction", derived(true)},
           {"strong", derived(true)},
           {"constructive", derived(true)}}};
}

ExampleBundle build_energy(bool restricted) {
  const Values three{0, 1, 2};
  CausalModel low = make_model(
      {{"UV", three}, {"UH", three}, {"UM", three}},
      {{"V", three, "UV"}, {"H", three, "UH"}, {"M", three, "UM"}});
  CausalModel high = make_model({{"UK", three}, {"UP", three}},
                                {{"K", three, "UK"}, {"P", three, "UP"}});
  auto energy = [](std::span<const Value> v) {
    return Values{(v[2] + 2 * v[0]) % 3, (v[2] + v[1]) % 3};
  };
  StateMap tau = tau_from(low, high, energy);
  if (!restricted) {
    return {"energy",
            "velocity, height and mass on {0,1,2} against modular kinetic and "
            "potential energy, all interventions",
            low, high, std::move(tau), std::nullopt,
            std::nullopt, std::nullopt, std::nullopt,
            {{"abstraction", derived(false)}, {"strong", derived(false)}}};
  }
  std::vector<Intervention> low_list{Intervention()}, high_list{Intervention()};
  for (const auto& a : assignments(low.signature().endogenous()))
    low_list.push_back(assign({{"V", a[0]}, {"H", a[1]}, {"M", a[2]}}));
  for (const auto& a : assignments(high.signature().endogenous()))
    high_list.push_back(assign({{"K", a[0]}, {"P", a[1]}}));
  low = low.with_allowed(AllowedInterventions::only(low_list));
  high = high.with_allowed(AllowedInterventions::only(high_list));
  return {"energy-restricted",
          "velocity, height and mass on {0,1,2} against modular kinetic and "
          "potential energy, empty and full interventions only",
          low, high, tau, omega_tau_on(low, tau),
          std::nullopt, std::nullopt, std::nullopt,
          {{"uniform", derived(true)},
           {"abstraction", derived(true)},
           {"strong", derived(false)}}};
}

ExampleBundle build_sum_aggregation() {
  CausalModel low = make_model(
      {{"U1", {0, 1}}, {"U2", {0, 1}}, {"N", {0, 1}}},
      {{"X1", {0, 1}, "U1"}, {"X2", {0, 1}, "U2"}, {"Y", range(0, 3), "X1 + X2 + N"}});
  CausalModel high = make_model({{"US", range(0, 2)}, {"N", {0, 1}}},
                                {{"S", range(0, 2), "US"}, {"Y", range(0, 3), "S + N"}});
  std::vector<Intervention> low_list, high_list;
  for (const auto& i : enumerate_all(low))
    if (i.contains("X1") == i.contains("X2")) low_list.push_back(i);
  high_list = enumerate_all(high);
  low = low.with_allowed(AllowedInterventions::only(low_list));
  high = high.with_allowed(AllowedInterventions::only(high_list));

  StateMap tau = tau_from(low, high, [](std::span<const Value> v) {
    return Values{v[0] + v[1], v[2]};
  });
  auto omega = omega_from(low_list, [](const Intervention& i) {
    std::map<std::string, Value> m;
    if (i.contains("X1")) m["S"] = *i.value("X1") + *i.value("X2");
    if (auto y = i.value("Y")) m["Y"] = *y;
    return Intervention(std::move(m));
  });
  auto low_dist = uniform_distribution(low.signature().contexts());
  auto high_dist = context_pushforward(
      tau_u_from(low, high, [](std::span<const Value> u) {
        return Values{u[0] + u[1], u[2]};
      }),
      low_dist);
  return {"sum-aggregation",
          "two binary causes and a noisy sum against their total and the same sum",
          low, high, std::move(tau), std::move(omega), low_dist, high_dist,
          Partition{{{"S", {"X1", "X2"}}, {"Y", {"Y"}}}, {}},
          {{"exact", derived(true)},
           {"uniform", derived(true)},
           {"abstraction", derived(true)},
           {"strong", derived(true)},
           {"constructive", derived(true)}}};
}

CheckReport run_check(const ExampleBundle& bundle, const std::string& check,
                      const Limits& limits) {
  auto missing = [&](const char* what) {
    return InputError("example '" + bundle.name + "' has no " + what +
                      " for the " + check + " check");
  };
  if (check == "exact") {
    if (!bundle.omega) throw missing("ω");
    if (!bundle.low_dist || !bundle.high_dist) throw missing("distributions");
    return check_exact(bundle.low, *bundle.low_dist, bundle.high, *bundle.high_dist,
                       bundle.tau, *bundle.omega, limits);
  }
  if (check == "uniform") {
    if (!bundle.omega) throw missing("ω");
    return check_uniform(bundle.low, bundle.high, bundle.tau, *bundle.omega, limits);
  }
  if (check == "abstraction")
    return check_tau_abstraction(bundle.low, bundle.high, bundle.tau, limits);
  if (check == "strong")
    return check_strong_abstraction(bundle.low, bundle.high, bundle.tau, limits);
  if (check == "constructive") {
    if (!bundle.partition) throw missing("partition");
    return check_constructive(bundle.low, bundle.high, bundle.tau, *bundle.partition,
                              std::nullopt, limits);
  }
  throw InputError("unknown check '" + check + "'");
}

std::vector<std::string> corpus_names() {
  return {"example3",       "example3-reverse", "example4",
          "example4-reverse", "example4-identity", "xstar",
          "xstar-random",   "pixel-2",          "pixel-2-merged",
          "appendix",       "appendix-x3",      "voting-4-2-1",
          "energy",         "energy-restricted", "sum-aggregation"};
}

ExampleBundle build_named(const std::string& name) {
  if (name == "example3") return build_example3().first;
  if (name == "example3-reverse") return build_example3().second;
  if (name == "example4") return build_example4(Example4Omega::kForward);
  if (name == "example4-reverse") return build_example4(Example4Omega::kBackward);
  if (name == "example4-identity") return build_example4(Example4Omega::kIdentity);
  if (name == "xstar") return build_example5_xstar(copy_model(3));
  if (name == "xstar-random") return build_example5_xstar(copy_model(3), 1);
  if (name == "pixel-2") return build_pixel(2, PixelVariant::kTwoCounter);
  if (name == "pixel-2-merged") return build_pixel(2, PixelVariant::kMerged);
  if (name == "appendix") return build_appendix_example().first;
  if (name == "appendix-x3") return build_appendix_example().second;
  if (name == "voting-4-2-1") return build_voting(4, 2, 1);
  if (name == "energy") return build_energy(false);
  if (name == "energy-restricted") return build_energy(true);
  if (name == "sum-aggregation") return build_sum_aggregation();
  throw InputError("unknown corpus example '" + name + "'");
}

}  // namespace cak
