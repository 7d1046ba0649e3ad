#pragma once

#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cak/expression.hpp"
#include "cak/limits.hpp"
#include "cak/scm.hpp"

namespace cak {

// A map from total assignments over `source` to total assignments over
// `target`, materialized as a dense table. Entries may be missing; the map
// reports whether it is total.
class VariableMap {
 public:
  using Row = std::pair<std::vector<Value>, std::vector<Value>>;
  static constexpr std::size_t kUndefined = std::numeric_limits<std::size_t>::max();

  VariableMap() = default;

  // Throws InputError on rows outside either space or duplicate sources.
  static VariableMap from_table(Space source, Space target,
                                const std::vector<Row>& rows,
                                const Limits& limits = {});
  // One expression per target variable over the source variables.
  static VariableMap from_expressions(
      Space source, Space target,
      const std::map<std::string, Expression>& expressions,
      const Limits& limits = {});
  static VariableMap from_function(
      Space source, Space target,
      const std::function<std::vector<Value>(std::span<const Value>)>& f,
      const Limits& limits = {});

  const Space& source() const { return source_; }
  const Space& target() const { return target_; }

  bool is_total() const;
  // First source assignment without an image, if any.
  std::optional<std::vector<Value>> first_undefined() const;

  // Target index for a source index; kUndefined if absent.
  std::size_t image_index(std::size_t source_index) const {
    return image_[source_index];
  }
  // Throws InputError when undefined or malformed.
  std::vector<Value> apply(std::span<const Value> from) const;

  // Target assignments never hit, in index order.
  std::vector<std::vector<Value>> missed_targets() const;

  // Present when built from expressions; used for readable serialization.
  const std::optional<std::map<std::string, Expression>>& expressions() const {
    return expressions_;
  }

  std::vector<Row> rows() const;

  friend bool operator==(const VariableMap& a, const VariableMap& b) {
    return a.source_.variables() == b.source_.variables() &&
           a.target_.variables() == b.target_.variables() &&
           a.image_ == b.image_;
  }

 private:
  VariableMap(Space source, Space target, const Limits& limits);

  Space source_;
  Space target_;
  std::vector<std::size_t> image_;
  std::optional<std::map<std::string, Expression>> expressions_;
};

// τ: low endogenous states -> high endogenous states.
class StateMap : public VariableMap {
 public:
  StateMap() = default;
  explicit StateMap(VariableMap m) : VariableMap(std::move(m)) {}
  EndoState operator()(const EndoState& s) const { return {apply(s.values)}; }

  static StateMap identity(const Space& states, const Limits& limits = {});
};

// τ_U: low contexts -> high contexts.
class ContextMap : public VariableMap {
 public:
  ContextMap() = default;
  explicit ContextMap(VariableMap m) : VariableMap(std::move(m)) {}
  Context operator()(const Context& c) const { return {apply(c.values)}; }
};

// Throws InputError unless the two variable lists agree on names and
// domains. `what` names the mismatch in the message.
void require_same_variables(const std::vector<VariableDecl>& expected,
                            const std::vector<VariableDecl>& actual,
                            const std::string& what);

}  // namespace cak
