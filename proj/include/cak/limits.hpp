#pragma once

#include <cstddef>

namespace cak {

// Size caps for exhaustive enumeration. `max_contexts` bounds every
// enumerated assignment space (contexts, endogenous states, table domains).
struct Limits {
  std::size_t max_interventions = 10'000'000;
  std::size_t max_contexts = 1'000'000;
  // Largest low signature handed to the constructive partition search.
  std::size_t max_partition_variables = 10;

  // Defaults overridden by CAK_MAX_INTERVENTIONS / CAK_MAX_CONTEXTS.
  static Limits from_environment();
};

}  // namespace cak
