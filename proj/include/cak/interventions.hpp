#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cak/intervention.hpp"
#include "cak/limits.hpp"
#include "cak/scm.hpp"

namespace cak {

// Every partial assignment over the endogenous variables, the empty one
// first. Odometer order over declaration order, each variable cycling
// through "unset" then its domain values. Throws SizeLimitError above
// limits.max_interventions.
std::vector<Intervention> enumerate_all(const CausalModel& model,
                                        const Limits& limits = {});

// Number of interventions enumerate_all would return, saturating.
std::size_t count_all_interventions(const CausalModel& model);

// An explicit finite intervention map ω.
class InterventionMap {
 public:
  InterventionMap() = default;
  // Throws InputError if a source intervention appears twice.
  explicit InterventionMap(std::vector<std::pair<Intervention, Intervention>> entries);

  static InterventionMap identity(const std::vector<Intervention>& domain);

  const std::vector<std::pair<Intervention, Intervention>>& entries() const {
    return entries_;
  }
  std::optional<Intervention> find(const Intervention& source) const;
  // Throws InputError if `source` is not in the domain.
  const Intervention& at(const Intervention& source) const;

  std::vector<Intervention> domain() const;
  std::vector<Intervention> image() const;  // distinct, first-seen order

 private:
  std::vector<std::pair<Intervention, Intervention>> entries_;
  std::map<Intervention, std::size_t> index_;
};

struct OmegaCheck {
  bool surjective = false;
  // i1 ≺ i2 (strictly) implies ω(i1) ≼ ω(i2).
  bool order_preserving = false;
  // i1 ≺ i2 implies ω(i1) ≺ ω(i2); collapsing comparable pairs fails this.
  bool strictly_order_preserving = false;
  std::vector<Intervention> missed;  // elements of I_H outside the image
  std::vector<std::pair<Intervention, Intervention>> order_violations;
  std::vector<std::pair<Intervention, Intervention>> strict_violations;

  bool ok() const { return surjective && order_preserving; }
};

// Throws InputError if ω is not total on `low` or maps outside `high`.
OmegaCheck check_omega(const InterventionMap& omega,
                       const std::vector<Intervention>& low,
                       const std::vector<Intervention>& high);

}  // namespace cak
