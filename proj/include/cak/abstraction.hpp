#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cak/interventions.hpp"
#include "cak/limits.hpp"
#include "cak/maps.hpp"
#include "cak/report.hpp"
#include "cak/scm.hpp"
#include "cak/transform.hpp"

namespace cak {

// All total assignments over `space` agreeing with `fixed`, in index order.
// Throws InputError if `fixed` names a variable or value outside `space`.
std::vector<std::vector<Value>> rst(const Space& space, const Intervention& fixed,
                                    const Limits& limits = {});

// The high intervention Y <- y with τ(Rst(V_L, x)) = Rst(V_H, y), if any.
// Only the coordinates constant on the image can be fixed, so that is the
// single candidate tested. Throws InputError if τ is undefined on Rst(x).
std::optional<Intervention> derive_omega_tau(const StateMap& tau,
                                             const Intervention& i,
                                             const Limits& limits = {});

// Every high intervention satisfying the image condition, found by trying
// them all. Meant for cross-checking derive_omega_tau on small signatures.
std::vector<Intervention> omega_tau_candidates(const StateMap& tau,
                                               const Intervention& i,
                                               const Limits& limits = {});

struct InducedSets {
  std::vector<Intervention> low;        // where ω_τ is defined
  std::vector<Intervention> high;       // ω_τ(low), first-seen order
  std::vector<Intervention> undefined;  // where ω_τ is undefined
  InterventionMap omega;                // ω_τ restricted to `low`
};

// Runs derive_omega_tau over every low intervention.
InducedSets compute_induced_sets(const CausalModel& low, const CausalModel& high,
                                 const StateMap& tau, const Limits& limits = {});

// τ is surjective, some surjective τ_U is compatible with (τ, ω_τ) on the
// allowed low interventions, and ω_τ maps those onto the allowed high ones.
// The failed condition is one of "tau_surjective", "omega_defined",
// "compatible", "surjective_tau_u", "intervention_sets".
CheckReport check_tau_abstraction(const CausalModel& low, const CausalModel& high,
                                  const StateMap& tau, const Limits& limits = {});

// Every high intervention is induced, and the τ-abstraction check passes
// with the induced intervention sets ("induced_high_interventions" or a
// τ-abstraction condition on failure).
CheckReport check_strong_abstraction(const CausalModel& low,
                                     const CausalModel& high,
                                     const StateMap& tau,
                                     const Limits& limits = {});

// Cells in high declaration order, one per high variable; the marginal
// cell may be empty.
struct Partition {
  std::vector<std::pair<std::string, std::vector<std::string>>> cells;
  std::vector<std::string> marginal;

  friend bool operator==(const Partition&, const Partition&) = default;
};

// Per high variable: values of its cell, in cell order -> high value.
struct ComponentMaps {
  std::map<std::string, std::map<std::vector<Value>, Value>> tables;

  friend bool operator==(const ComponentMaps&, const ComponentMaps&) = default;
};

// Throws InputError unless the partition fits the two signatures.
void require_partition(const CausalModel& low, const CausalModel& high,
                       const Partition& partition);

// Reads each τ_i off τ. Fails ("factoring") when two low states agree on a
// cell but τ gives them different values for its high variable.
struct Factoring {
  std::optional<ComponentMaps> maps;
  std::string summary;
  Json counterexample;
};
Factoring derive_component_maps(const CausalModel& low, const CausalModel& high,
                                const StateMap& tau, const Partition& partition,
                                const Limits& limits = {});

// τ factors through the partition via `maps` (derived from τ when absent),
// and the strong check passes.
CheckReport check_constructive(const CausalModel& low, const CausalModel& high,
                               const StateMap& tau, const Partition& partition,
                               const std::optional<ComponentMaps>& maps,
                               const Limits& limits = {});

struct PartitionSearch {
  std::optional<Partition> partition;
  std::optional<ComponentMaps> maps;
  CheckReport report;
};

// Finds the first partition through which τ factors, trying labelings of the
// low variables in order (first variable most significant, the marginal
// cell before the high variables in declaration order), then runs the
// strong check. Strongness does not depend on the partition, so one
// factoring partition settles the question.
PartitionSearch search_constructive_partition(const CausalModel& low,
                                              const CausalModel& high,
                                              const StateMap& tau,
                                              const Limits& limits = {});

Json partition_json(const Partition& partition);
Json component_maps_json(const Partition& partition, const ComponentMaps& maps);

}  // namespace cak
