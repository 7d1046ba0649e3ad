#include <doctest.h>

#include "cak/abstraction.hpp"
#include "cak/corpus.hpp"
#include "cak/errors.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace cak;

namespace {

Intervention iv(std::map<std::string, Value> m) { return Intervention(std::move(m)); }

bool surjective(const StateMap& tau) { return tau.missed_targets().empty(); }

// A random pair for the abstraction checks: planted (so that surjective τ
// and a compatible τ_U are common) or unrelated, with all interventions or
// a random list allowed.
gen::Pair random_pair(std::mt19937_64& rng, std::size_t round) {
  CausalModel high = oracle::random_binary_model(rng, 1 + rng() % 2, 1 + rng() % 2);
  auto unrelated = [&] {
    CausalModel low = oracle::random_binary_model(rng, 2 + rng() % 2, 1 + rng() % 2);
    auto tau = oracle::random_state_map(rng, low.signature().states(),
                                        high.signature().states());
    return gen::Pair{low, high, tau, {}};
  };
  gen::Pair p = round % 3 != 2 ? gen::planted(rng, high, "Z", rng() % 2) : unrelated();
  if (rng() % 2) {
    auto list = gen::random_list(rng, p.low, 4);
    p.low = p.low.with_allowed(AllowedInterventions::only(list));
    if (rng() % 2) {
      std::set<Intervention> image;
      for (const auto& i : list)
        if (auto h = derive_omega_tau(p.tau, i)) image.insert(*h);
      p.high = p.high.with_allowed(AllowedInterventions::only({image.begin(), image.end()}));
    }
  }
  return p;
}

// Labelings in order, marginal first, checked by comparing τ on states that
// agree on a cell.
std::optional<Partition> first_factoring_partition(const StateMap& tau) {
  const auto& lows = tau.source().variables();
  const auto& highs = tau.target().variables();
  auto states = oracle::states(lows);
  std::vector<std::size_t> label(lows.size(), 0);
  for (;;) {
    bool ok = true;
    for (std::size_t y = 0; y < highs.size() && ok; ++y) {
      bool nonempty = false;
      for (auto l : label) nonempty = nonempty || l == y + 1;
      ok = nonempty;
      for (const auto& s : states)
        for (const auto& t : states) {
          if (!ok) break;
          bool agree = true;
          for (std::size_t x = 0; x < lows.size(); ++x)
            if (label[x] == y + 1) agree = agree && s.values[x] == t.values[x];
          if (agree && tau(s).values[y] != tau(t).values[y]) ok = false;
        }
    }
    if (ok) {
      Partition p;
      for (const auto& h : highs) p.cells.emplace_back(h.name, std::vector<std::string>{});
      for (std::size_t x = 0; x < lows.size(); ++x) {
        if (label[x] == 0) p.marginal.push_back(lows[x].name);
        else p.cells[label[x] - 1].second.push_back(lows[x].name);
      }
      return p;
    }
    std::size_t x = lows.size();
    while (x-- > 0) {
      if (++label[x] <= highs.size()) break;
      label[x] = 0;
    }
    if (x == static_cast<std::size_t>(-1)) return std::nullopt;
  }
}

}  // namespace

TEST_CASE("rst lists the total extensions") {
  auto m = copy_model(3);
  auto all = rst(m.signature().states(), iv({{"X2", 1}}));
  CHECK(all.size() == 4);
  for (const auto& s : all) CHECK(s[1] == 1);
  CHECK(rst(m.signature().states(), Intervention()).size() == 8);
  CHECK_THROWS_AS(rst(m.signature().states(), iv({{"Q", 0}})), InputError);
  CHECK_THROWS_AS(rst(m.signature().states(), iv({{"X1", 4}})), InputError);
}

TEST_CASE("derive_omega_tau matches exhaustive search and is unique") {
  auto ex4 = build_example4(Example4Omega::kForward);
  CHECK(derive_omega_tau(ex4.tau, iv({{"X1", 0}})) == iv({{"X1", 0}}));

  std::mt19937_64 rng(31);
  for (std::size_t round = 0; round < 60; ++round) {
    CAPTURE(round);
    auto low = oracle::random_binary_model(rng, 1 + rng() % 3, 1);
    auto high = oracle::random_binary_model(rng, 1 + rng() % 2, 1);  // <= 4 states
    StateMap tau = round % 4 == 0
                       ? gen::planted(rng, high, "Z", false).tau
                       : oracle::random_state_map(rng, low.signature().states(),
                                                  high.signature().states());
    for (const auto& i : oracle::all_interventions(tau.source().variables())) {
      auto all = oracle::omega_tau_all(tau, i);
      REQUIRE(all.size() <= 1);
      CHECK(omega_tau_candidates(tau, i) == all);
      CHECK(derive_omega_tau(tau, i) == oracle::omega_tau(tau, i));
    }
  }
}

TEST_CASE("induced sets of the three-copy example") {
  auto [induced_bundle, x3_bundle] = build_appendix_example();
  auto induced = compute_induced_sets(induced_bundle.low, induced_bundle.high,
                                      induced_bundle.tau);
  std::set<Intervention> undefined(induced.undefined.begin(), induced.undefined.end());
  // Fixing X1 or X2 to 0 leaves the image of X3 attached to both outputs.
  CHECK(undefined == std::set<Intervention>{iv({{"X1", 0}}), iv({{"X2", 0}}),
                                            iv({{"X1", 0}, {"X2", 0}})});
  CHECK(induced.low.size() == 24);
  CHECK(induced.high.size() == 9);
  for (const auto& i : enumerate_all(induced_bundle.low))
    CHECK(derive_omega_tau(induced_bundle.tau, i).has_value() == !undefined.count(i));

  auto a = check_tau_abstraction(induced_bundle.low, induced_bundle.high, induced_bundle.tau);
  CHECK_FALSE(a.holds);
  CHECK(a.condition == "compatible");
  auto b = check_tau_abstraction(x3_bundle.low, x3_bundle.high, x3_bundle.tau);
  CHECK(b.holds);
  CHECK(x3_bundle.low.allowed_interventions().size() == 9);
  REQUIRE(b.tau_u);
  CHECK(b.tau_u->missed_targets().empty());
}

TEST_CASE("voting: ω_τ is undefined on a single voter") {
  auto b = build_voting(4, 2, 1);
  CHECK_FALSE(derive_omega_tau(b.tau, iv({{"X1", 1}})).has_value());
  CHECK(derive_omega_tau(b.tau, iv({{"X1", 1}, {"X2", 1}})) == iv({{"G1", 2}}));
  CHECK(derive_omega_tau(b.tau, iv({{"T", 3}})) == iv({{"Win", 1}}));
  auto induced = compute_induced_sets(b.low, b.high, b.tau);
  std::size_t by_candidates = 0;
  for (const auto& i : enumerate_all(b.low)) by_candidates += !omega_tau_candidates(b.tau, i).empty();
  CHECK(induced.low.size() == by_candidates);
  CHECK(induced.high.size() == enumerate_all(b.high).size());
}

TEST_CASE("τ-abstraction and strong abstraction agree with the oracle") {
  std::mt19937_64 rng(4242);
  std::size_t abstraction_hits = 0, strong_hits = 0;
  std::map<std::string, std::size_t> conditions;
  for (std::size_t round = 0; round < 150; ++round) {
    CAPTURE(round);
    auto p = random_pair(rng, round);
    auto truth = oracle::tau_abstraction(p.low, p.high, p.tau);
    REQUIRE(truth);
    auto r = check_tau_abstraction(p.low, p.high, p.tau);
    REQUIRE(r.holds == *truth);
    abstraction_hits += r.holds;
    ++conditions[r.condition];
    if (r.holds) CHECK(r.tau_u->missed_targets().empty());

    auto strong_truth = oracle::strong_abstraction(p.low, p.high, p.tau);
    REQUIRE(strong_truth);
    auto s = check_strong_abstraction(p.low, p.high, p.tau);
    REQUIRE(s.holds == *strong_truth);
    strong_hits += s.holds;
  }
  CHECK(abstraction_hits >= 15);
  CHECK(strong_hits >= 15);
  for (const char* c : {"", "tau_surjective", "compatible", "surjective_tau_u"})
    CHECK(conditions[c] > 0);
}

TEST_CASE("a τ-abstraction is a uniform transformation under ω_τ") {
  std::mt19937_64 rng(99);
  std::size_t seen = 0;
  auto verify = [&](const CausalModel& low, const CausalModel& high, const StateMap& tau) {
    if (!check_tau_abstraction(low, high, tau).holds) return;
    ++seen;
    std::vector<std::pair<Intervention, Intervention>> entries;
    for (const auto& i : low.allowed_interventions())
      entries.emplace_back(i, *derive_omega_tau(tau, i));
    CHECK(check_uniform(low, high, tau, InterventionMap(entries)).holds);
  };
  for (std::size_t round = 0; round < 150; ++round) {
    auto p = random_pair(rng, round);
    verify(p.low, p.high, p.tau);
  }
  for (const auto& name : corpus_names()) {
    CAPTURE(name);
    auto b = build_named(name);
    verify(b.low, b.high, b.tau);
  }
  CHECK(seen >= 20);
}

TEST_CASE("ω_τ structure on every surjective corpus τ") {
  for (const auto& name : corpus_names()) {
    CAPTURE(name);
    auto b = build_named(name);
    if (!surjective(b.tau)) continue;
    CHECK(derive_omega_tau(b.tau, Intervention()) == Intervention());
    const auto& low_vars = b.low.signature().endogenous();
    const auto& high_vars = b.high.signature().endogenous();
    for (const auto& s : oracle::states(low_vars)) {
      std::map<std::string, Value> full, image;
      for (std::size_t k = 0; k < low_vars.size(); ++k) full[low_vars[k].name] = s.values[k];
      auto t = b.tau(s);
      for (std::size_t k = 0; k < high_vars.size(); ++k) image[high_vars[k].name] = t.values[k];
      CHECK(derive_omega_tau(b.tau, iv(full)) == iv(image));
    }
    auto induced = compute_induced_sets(b.low, b.high, b.tau);
    for (const auto& i1 : induced.low)
      for (const auto& i2 : induced.low)
        if (natural_less(i1, i2)) CHECK(natural_leq(induced.omega.at(i1), induced.omega.at(i2)));
  }
}

TEST_CASE("the hierarchy is monotone on the corpus and on random pairs") {
  auto verify = [](const CausalModel& low, const CausalModel& high, const StateMap& tau) {
    auto constructive = search_constructive_partition(low, high, tau);
    auto strong = check_strong_abstraction(low, high, tau);
    auto induced = compute_induced_sets(low, high, tau);
    auto l = low.with_allowed(AllowedInterventions::only(induced.low));
    auto h = high.with_allowed(AllowedInterventions::only(induced.high));
    auto abstraction = check_tau_abstraction(l, h, tau);
    bool uniform = false;
    if (check_omega(induced.omega, induced.low, induced.high).ok())
      uniform = check_uniform(l, h, tau, induced.omega).holds;
    if (constructive.report.holds) CHECK(strong.holds);
    if (strong.holds) CHECK(abstraction.holds);
    if (abstraction.holds) CHECK(uniform);
    return constructive.report.holds;
  };
  std::size_t constructive_seen = 0;
  for (const auto& name : corpus_names()) {
    CAPTURE(name);
    auto b = build_named(name);
    constructive_seen += verify(b.low, b.high, b.tau);
  }
  CHECK(constructive_seen >= 3);
  std::mt19937_64 rng(8);
  for (std::size_t round = 0; round < 100; ++round) {
    auto p = random_pair(rng, round);
    verify(p.low, p.high, p.tau);
  }
}

TEST_CASE("partition search") {
  SUBCASE("identity τ gives singleton cells") {
    auto m = copy_model(3);
    auto r = search_constructive_partition(m, m, StateMap::identity(m.signature().states()));
    REQUIRE(r.partition);
    CHECK(r.partition->cells ==
          std::vector<std::pair<std::string, std::vector<std::string>>>{
              {"X1", {"X1"}}, {"X2", {"X2"}}, {"X3", {"X3"}}});
    CHECK(r.partition->marginal.empty());
    CHECK(r.report.holds);
  }
  SUBCASE("merged pixel counts") {
    auto b = build_named("pixel-2-merged");
    auto r = search_constructive_partition(b.low, b.high, b.tau);
    REQUIRE(r.partition);
    CHECK(r.partition->cells ==
          std::vector<std::pair<std::string, std::vector<std::string>>>{
              {"ULH", {"X11", "X12", "X21"}}});
    CHECK(r.partition->marginal == std::vector<std::string>{"X22"});
    CHECK(r.report.holds);
    CHECK(r.maps->tables.at("ULH").at({1, 0, 1}) == 2);
  }
  SUBCASE("three copies cannot be split") {
    auto b = build_appendix_example().first;
    auto r = search_constructive_partition(b.low, b.high, b.tau);
    CHECK_FALSE(r.partition);
    CHECK_FALSE(r.report.holds);
    CHECK(r.report.condition == "factoring");
    CHECK(r.report.counterexample["low_variable"] == "X3");
  }
  SUBCASE("first factoring labeling, against brute force") {
    std::mt19937_64 rng(12);
    for (std::size_t round = 0; round < 80; ++round) {
      CAPTURE(round);
      auto low = oracle::random_binary_model(rng, 2 + rng() % 3, 1);
      auto high = oracle::random_binary_model(rng, 1 + rng() % 2, 1);
      // Build τ from component maps half the time so that partitions exist.
      StateMap tau;
      if (round % 2 == 0) {
        std::vector<std::size_t> label(low.signature().endogenous().size());
        for (auto& l : label) l = rng() % (high.signature().endogenous().size() + 1);
        std::vector<std::map<std::vector<Value>, Value>> parts(high.signature().endogenous().size());
        tau = StateMap(VariableMap::from_function(
            low.signature().states(), high.signature().states(),
            [&](std::span<const Value> v) {
              std::vector<Value> out;
              for (std::size_t y = 0; y < parts.size(); ++y) {
                std::vector<Value> key;
                for (std::size_t x = 0; x < v.size(); ++x)
                  if (label[x] == y + 1) key.push_back(v[x]);
                auto it = parts[y].find(key);
                if (it == parts[y].end()) it = parts[y].emplace(key, rng() % 2).first;
                out.push_back(it->second);
              }
              return out;
            }));
      } else {
        tau = oracle::random_state_map(rng, low.signature().states(), high.signature().states());
      }
      auto expected = first_factoring_partition(tau);
      auto r = search_constructive_partition(low, high, tau);
      CHECK(r.partition == expected);
      if (expected) {
        auto direct = check_constructive(low, high, tau, *expected, std::nullopt);
        CHECK(direct.holds == r.report.holds);
        CHECK(direct.holds == check_strong_abstraction(low, high, tau).holds);
      }
    }
  }
}

TEST_CASE("constructive check with a given partition") {
  auto b = build_voting(4, 2, 1);
  auto r = check_constructive(b.low, b.high, b.tau, *b.partition, std::nullopt);
  CHECK(r.holds);
  auto maps = derive_component_maps(b.low, b.high, b.tau, *b.partition);
  REQUIRE(maps.maps);
  CHECK(maps.maps->tables.at("G2").at({1, 1}) == 2);
  CHECK(maps.maps->tables.at("Win").at({3}) == 1);
  CHECK(maps.maps->tables.at("Win").at({2}) == 0);
  auto json = component_maps_json(*b.partition, *maps.maps);
  CHECK(json["G1"].size() == 4);
  CHECK(partition_json(*b.partition)["cells"]["Win"] == Json::array({"T"}));

  auto appendix = build_appendix_example().first;
  Partition split{{{"Y1", {"X1", "X3"}}, {"Y2", {"X2"}}}, {}};
  auto f = derive_component_maps(appendix.low, appendix.high, appendix.tau, split);
  CHECK_FALSE(f.maps);
  auto c = check_constructive(appendix.low, appendix.high, appendix.tau, split, std::nullopt);
  CHECK_FALSE(c.holds);
  CHECK(c.condition == "factoring");

  // Supplied maps must reproduce τ.
  ComponentMaps wrong = *maps.maps;
  wrong.tables["Win"][{3}] = 0;
  CHECK_FALSE(check_constructive(b.low, b.high, b.tau, *b.partition, wrong).holds);

  CHECK_THROWS_AS(require_partition(b.low, b.high, Partition{{{"G1", {"X1"}}}, {}}), InputError);
  Partition twice = *b.partition;
  twice.marginal.push_back("X1");
  CHECK_THROWS_AS(require_partition(b.low, b.high, twice), InputError);
  Partition missing = *b.partition;
  missing.cells.back().second.clear();
  CHECK_THROWS_AS(require_partition(b.low, b.high, missing), InputError);
}

TEST_CASE("the pixel two-counter model is not strong") {
  auto b = build_named("pixel-2");
  auto r = check_strong_abstraction(b.low, b.high, b.tau);
  REQUIRE_FALSE(r.holds);
  CHECK(r.condition == "induced_high_interventions");
  std::set<Intervention> missing;
  for (const auto& m : r.counterexample["missing_high_interventions"])
    missing.insert(iv(m.get<std::map<std::string, Value>>()));
  CHECK(missing.count(iv({{"UH", 1}})));
  CHECK(missing.count(iv({{"LH", 0}})));

  auto abstraction = check_tau_abstraction(b.low, b.high, b.tau);
  CHECK_FALSE(abstraction.holds);
  CHECK(abstraction.condition == "tau_surjective");
}
