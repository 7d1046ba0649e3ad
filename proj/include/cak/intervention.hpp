#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "cak/expression.hpp"

namespace cak {

// A partial assignment X <- x to endogenous variables; possibly empty.
class Intervention {
 public:
  Intervention() = default;
  explicit Intervention(std::map<std::string, Value> assignments)
      : assignments_(std::move(assignments)) {}

  // Parses "X1=0,X2=1"; an empty string is the empty intervention.
  static Intervention parse(std::string_view text);

  bool empty() const { return assignments_.empty(); }
  std::size_t size() const { return assignments_.size(); }
  bool contains(const std::string& variable) const {
    return assignments_.count(variable) != 0;
  }
  std::optional<Value> value(const std::string& variable) const;
  const std::map<std::string, Value>& assignments() const {
    return assignments_;
  }
  std::set<std::string> variables() const;

  // Union of two interventions; throws InputError if they overlap.
  Intervention merged_with(const Intervention& other) const;

  // "∅" or "X1←0, X2←1".
  std::string to_string() const;

  friend auto operator<=>(const Intervention&, const Intervention&) = default;
  friend bool operator==(const Intervention&, const Intervention&) = default;

 private:
  std::map<std::string, Value> assignments_;
};

// The natural partial order: `lhs` sets a subset of the variables of `rhs`,
// to the same values.
bool natural_leq(const Intervention& lhs, const Intervention& rhs);

// Strict version of natural_leq.
inline bool natural_less(const Intervention& lhs, const Intervention& rhs) {
  return lhs.size() < rhs.size() && natural_leq(lhs, rhs);
}

}  // namespace cak
