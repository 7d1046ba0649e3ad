#include "cak/interventions.hpp"

#include <limits>
#include <set>

#include "cak/errors.hpp"

namespace cak {

std::size_t count_all_interventions(const CausalModel& model) {
  std::size_t count = 1;
  for (const auto& v : model.signature().endogenous()) {
    std::size_t options = v.domain.size() + 1;
    if (count > std::numeric_limits<std::size_t>::max() / options) {
      return std::numeric_limits<std::size_t>::max();
    }
    count *= options;
  }
  return count;
}

std::vector<Intervention> enumerate_all(const CausalModel& model,
                                        const Limits& limits) {
  std::size_t count = count_all_interventions(model);
  if (count > limits.max_interventions) {
    throw SizeLimitError(
        "the model has " +
        (count == std::numeric_limits<std::size_t>::max()
             ? std::string("more than 2^64")
             : std::to_string(count)) +
        " interventions, above the cap of " +
        std::to_string(limits.max_interventions));
  }
  const auto& vars = model.signature().endogenous();
  // choice[k] == 0: unset; otherwise domain[choice[k] - 1].
  std::vector<std::size_t> choice(vars.size(), 0);
  std::vector<Intervention> out;
  out.reserve(count);
  for (;;) {
    std::map<std::string, Value> a;
    for (std::size_t k = 0; k < vars.size(); ++k) {
      if (choice[k]) a.emplace(vars[k].name, vars[k].domain[choice[k] - 1]);
    }
    out.emplace_back(std::move(a));
    std::size_t k = vars.size();
    while (k-- > 0) {
      if (++choice[k] <= vars[k].domain.size()) break;
      choice[k] = 0;
    }
    if (k == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

InterventionMap::InterventionMap(
    std::vector<std::pair<Intervention, Intervention>> entries)
    : entries_(std::move(entries)) {
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (!index_.emplace(entries_[k].first, k).second) {
      throw InputError("intervention map lists {" +
                       entries_[k].first.to_string() + "} twice");
    }
  }
}

InterventionMap InterventionMap::identity(
    const std::vector<Intervention>& domain) {
  std::vector<std::pair<Intervention, Intervention>> entries;
  entries.reserve(domain.size());
  for (const auto& i : domain) entries.emplace_back(i, i);
  return InterventionMap(std::move(entries));
}

std::optional<Intervention> InterventionMap::find(
    const Intervention& source) const {
  auto it = index_.find(source);
  if (it == index_.end()) return std::nullopt;
  return entries_[it->second].second;
}

const Intervention& InterventionMap::at(const Intervention& source) const {
  auto it = index_.find(source);
  if (it == index_.end()) {
    throw InputError("intervention map is undefined on {" +
                     source.to_string() + "}");
  }
  return entries_[it->second].second;
}

std::vector<Intervention> InterventionMap::domain() const {
  std::vector<Intervention> out;
  out.reserve(entries_.size());
  for (const auto& [from, to] : entries_) out.push_back(from);
  return out;
}

std::vector<Intervention> InterventionMap::image() const {
  std::vector<Intervention> out;
  std::set<Intervention> seen;
  for (const auto& [from, to] : entries_) {
    if (seen.insert(to).second) out.push_back(to);
  }
  return out;
}

OmegaCheck check_omega(const InterventionMap& omega,
                       const std::vector<Intervention>& low,
                       const std::vector<Intervention>& high) {
  std::set<Intervention> high_set(high.begin(), high.end());
  std::vector<const Intervention*> images;
  images.reserve(low.size());
  for (const auto& i : low) {
    const Intervention& target = omega.at(i);
    if (!high_set.count(target)) {
      throw InputError("intervention map sends {" + i.to_string() + "} to {" +
                       target.to_string() +
                       "}, which is not an allowed high-level intervention");
    }
    images.push_back(&target);
  }

  OmegaCheck out;
  std::set<Intervention> hit;
  for (const auto* target : images) hit.insert(*target);
  for (const auto& h : high) {
    if (!hit.count(h)) out.missed.push_back(h);
  }
  out.surjective = out.missed.empty();

  for (std::size_t a = 0; a < low.size(); ++a) {
    for (std::size_t b = 0; b < low.size(); ++b) {
      if (!natural_less(low[a], low[b])) continue;
      if (!natural_leq(*images[a], *images[b])) {
        out.order_violations.emplace_back(low[a], low[b]);
      }
      if (!natural_less(*images[a], *images[b])) {
        out.strict_violations.emplace_back(low[a], low[b]);
      }
    }
  }
  out.order_preserving = out.order_violations.empty();
  out.strictly_order_preserving = out.strict_violations.empty();
  return out;
}

}  // namespace cak
