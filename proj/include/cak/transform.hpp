#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "cak/interventions.hpp"
#include "cak/limits.hpp"
#include "cak/maps.hpp"
#include "cak/prob.hpp"
#include "cak/report.hpp"
#include "cak/scm.hpp"

namespace cak {

// Throws InputError unless tau maps the low endogenous variables to the
// high ones.
void require_tau_fits(const CausalModel& low, const CausalModel& high,
                      const StateMap& tau);

// Every allowed low intervention i must satisfy
// Pr_H^{ω(i)} = τ(Pr_L^{i}) exactly. ω must be total on the allowed low
// interventions, land in the allowed high ones, and pass check_omega.
CheckReport check_exact(const CausalModel& low, const RationalDistribution& low_dist,
                        const CausalModel& high, const RationalDistribution& high_dist,
                        const StateMap& tau, const InterventionMap& omega,
                        const Limits& limits = {});

// τ(M_L(u_L, i)) = M_H(τ_U(u_L), ω(i)) for every low context and every i in
// `interventions`.
CheckReport check_compatible(const ContextMap& tau_u, const StateMap& tau,
                             const InterventionMap& omega,
                             const CausalModel& low, const CausalModel& high,
                             const std::vector<Intervention>& interventions,
                             const Limits& limits = {});

struct SearchOptions {
  // Demand a τ_U that hits every high context.
  bool require_surjective = false;
  // Add every low context's full correspondent list to the witness.
  bool list_correspondents = false;
};

// Looks for τ_U compatible with (τ, ω) on `interventions`. Each low context
// is sent to its smallest correspondent: a high context whose responses
// under ω(i) match τ of the low responses under i, for every i. With
// require_surjective, low contexts are first matched to cover every high
// context. On failure the counterexample names a low context and a short
// list of interventions whose requirements no single high context meets.
CheckReport find_compatible_tau_u(const CausalModel& low, const CausalModel& high,
                                  const StateMap& tau, const InterventionMap& omega,
                                  const std::vector<Intervention>& interventions,
                                  const SearchOptions& options = {},
                                  const Limits& limits = {});

// Uniform transformation, decided through the existence of a compatible τ_U.
CheckReport check_uniform(const CausalModel& low, const CausalModel& high,
                          const StateMap& tau, const InterventionMap& omega,
                          const Limits& limits = {});

// Draws `samples` seeded low distributions and checks that pushing each
// through τ_U gives an exact transformation.
CheckReport uniform_distribution_probe(const CausalModel& low,
                                       const CausalModel& high,
                                       const StateMap& tau,
                                       const InterventionMap& omega,
                                       const ContextMap& tau_u,
                                       std::size_t samples, std::uint64_t seed,
                                       std::uint64_t max_denominator = 64,
                                       const Limits& limits = {});

// Composite of a lower transformation (L to I) followed by an upper one
// (I to H). Throws InputError if the intermediate spaces do not line up or
// the upper ω misses an image of the lower ω.
std::pair<StateMap, InterventionMap> compose_transformations(
    const StateMap& lower_tau, const InterventionMap& lower_omega,
    const StateMap& upper_tau, const InterventionMap& upper_omega,
    const Limits& limits = {});

}  // namespace cak
