#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cak/abstraction.hpp"
#include "cak/interventions.hpp"
#include "cak/maps.hpp"
#include "cak/prob.hpp"
#include "cak/report.hpp"
#include "cak/scm.hpp"
#include "cak/transform.hpp"

namespace cak {

struct Expectation {
  bool holds = false;
  // True when the verdict was settled by exhaustive checking rather than
  // being stated with the example.
  bool derived = false;
  // Set when the example's own statement disagrees with the checked verdict.
  std::string disagreement;
};

// A low/high model pair with everything the checks need. Check names are
// "exact", "uniform", "abstraction", "strong", "constructive".
struct ExampleBundle {
  std::string name;
  std::string description;
  CausalModel low;
  CausalModel high;
  StateMap tau;
  std::optional<InterventionMap> omega;
  std::optional<RationalDistribution> low_dist;
  std::optional<RationalDistribution> high_dist;
  std::optional<Partition> partition;
  std::map<std::string, Expectation> expected;
};

// Two unrelated one-variable models with only the empty intervention and
// constant state maps, in both directions.
std::pair<ExampleBundle, ExampleBundle> build_example3();

enum class Example4Omega { kForward, kBackward, kIdentity };
// X1 = U1, X2 = X1 against X1 = U1, X2 = U2 with identity τ. kForward maps
// X1<-x to (X1,X2)<-(x,x); kBackward is its inverse between the swapped
// models; kIdentity keeps X1<-x and lets the high model allow exactly that.
ExampleBundle build_example4(Example4Omega omega = Example4Omega::kForward);

// Extends `base` (which must list its allowed interventions explicitly or
// allow all) by U*, X* = U*, and X* as a parent of every other endogenous
// variable: with X* = 1 the original equations apply, with X* = 0 each
// variable takes the first value of its domain, or, given a seed, a random
// table over its original parents.
ExampleBundle build_example5_xstar(const CausalModel& base,
                                   std::optional<std::uint64_t> seed = std::nullopt);
// The three-pixel copy model used as the default base.
CausalModel copy_model(int n);

enum class PixelVariant { kTwoCounter, kMerged };
// n x n binary pixels, n even. The two-counter high model counts the upper
// and left halves through one coupled exogenous variable; the merged one
// counts their union.
ExampleBundle build_pixel(int n, PixelVariant variant);

// Three binary copies, τ(x) = (x1 | x3, x2 | x3). The first bundle allows
// the interventions where ω_τ is defined; the second allows only those that
// set X3 to 0.
std::pair<ExampleBundle, ExampleBundle> build_appendix_example();

// Voters with response-function exogenous variables, ads, and a total;
// the high model has group sums, the ads, and a strict-majority winner.
ExampleBundle build_voting(int n_voters, int n_groups, int n_ads);

// Velocity, height and mass on {0,1,2}, with modular stand-ins for kinetic
// and potential energy. With `restricted`, only the empty and full
// interventions are allowed.
ExampleBundle build_energy(bool restricted);

// Two copies and a noisy sum against their total and the same sum.
ExampleBundle build_sum_aggregation();

// Runs one named check with the bundle's own ω, distributions and
// partition. Throws InputError when the bundle lacks what the check needs.
CheckReport run_check(const ExampleBundle& bundle, const std::string& check,
                      const Limits& limits = {});

std::vector<std::string> corpus_names();
// Throws InputError for unknown names.
ExampleBundle build_named(const std::string& name);

}  // namespace cak
