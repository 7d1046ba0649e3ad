#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cak/errors.hpp"
#include "cak/intervention.hpp"
#include "cak/limits.hpp"
#include "cak/maps.hpp"
#include "cak/scm.hpp"

namespace cak {

using Rational = boost::multiprecision::cpp_rational;

// Always "p/q", including "1/1" and "0/1".
std::string to_string(const Rational& r);
// Accepts "p/q" or an integer; throws InputError otherwise.
Rational parse_rational(std::string_view text);

// Finite-support probability with exact masses. Zero masses are dropped.
template <class Outcome>
class Distribution {
 public:
  Distribution() = default;

  // Throws InputError on negative masses or a total other than 1.
  explicit Distribution(std::map<Outcome, Rational> masses)
      : masses_(std::move(masses)) {
    Rational total = 0;
    for (auto it = masses_.begin(); it != masses_.end();) {
      if (it->second < 0) throw InputError("negative probability");
      total += it->second;
      it = it->second == 0 ? masses_.erase(it) : std::next(it);
    }
    if (total != 1) {
      throw InputError("probabilities sum to " + cak::to_string(total) +
                       ", not 1");
    }
  }

  static Distribution point(Outcome o) {
    Distribution d;
    d.masses_.emplace(std::move(o), Rational(1));
    return d;
  }

  const std::map<Outcome, Rational>& masses() const { return masses_; }
  Rational mass(const Outcome& o) const {
    auto it = masses_.find(o);
    return it == masses_.end() ? Rational(0) : it->second;
  }

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::map<Outcome, Rational> masses_;
};

using RationalDistribution = Distribution<Context>;
using StateDistribution = Distribution<EndoState>;

// Image of `d` under `f`; masses landing on the same outcome add up.
template <class To, class From, class F>
Distribution<To> pushforward(const Distribution<From>& d, F&& f) {
  std::map<To, Rational> out;
  for (const auto& [o, p] : d.masses()) out[f(o)] += p;
  return Distribution<To>(std::move(out));
}

// Throws InputError unless every support context is well-typed for `model`.
void require_distribution(const CausalModel& model,
                          const RationalDistribution& d);

RationalDistribution uniform_distribution(const Space& contexts,
                                          const Limits& limits = {});

// Drops `denominator` unit masses onto uniformly drawn contexts, so every
// mass is k/denominator. Uses only the engine's raw output, which is fixed
// by the standard, so the draw is reproducible across platforms.
RationalDistribution random_distribution(const Space& contexts,
                                         std::mt19937_64& rng,
                                         std::uint64_t denominator);

StateDistribution push_to_states(const CausalModel& model,
                                 const RationalDistribution& d);
StateDistribution interventional_dist(const CausalModel& model,
                                      const RationalDistribution& d,
                                      const Intervention& i);
// Throws InputError if tau is undefined on a support state.
StateDistribution tau_pushforward(const StateMap& tau,
                                  const StateDistribution& sd);
RationalDistribution context_pushforward(const ContextMap& tau_u,
                                         const RationalDistribution& d);

struct EquivalenceReport {
  bool holds = false;
  std::string reason;
  // When a single intervention separates the models: the intervention, a
  // state, and its mass under each model.
  std::optional<Intervention> intervention;
  std::optional<EndoState> state;
  Rational first_mass = 0;
  Rational second_mass = 0;
};

// Compares the distributions of response profiles
// u -> (solve_under(m, u, i)) for i in `interventions` (default: every
// intervention of the shared signature). Throws InputError when the
// endogenous variables or their domains differ.
EquivalenceReport equivalent(
    const CausalModel& m1, const RationalDistribution& d1,
    const CausalModel& m2, const RationalDistribution& d2,
    const std::optional<std::vector<Intervention>>& interventions = std::nullopt,
    const Limits& limits = {});

// Re-encodes (model, d) with one fresh exogenous variable per endogenous
// variable, each ranging over the original contexts numbered 0..n-1 in index
// order. The new distribution sits on the diagonal.
std::pair<CausalModel, RationalDistribution> to_uev(
    const CausalModel& model, const RationalDistribution& d,
    const Limits& limits = {});

std::string describe(const CausalModel& model, const RationalDistribution& d);
std::string describe(const CausalModel& model, const StateDistribution& d);

}  // namespace cak
