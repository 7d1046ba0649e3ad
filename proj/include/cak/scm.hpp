#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cak/expression.hpp"
#include "cak/intervention.hpp"
#include "cak/limits.hpp"

namespace cak {

struct VariableDecl {
  std::string name;
  std::vector<Value> domain;

  friend bool operator==(const VariableDecl&, const VariableDecl&) = default;
};

// The product of the domains of an ordered list of variables. Assignments
// are indexed in lexicographic order, first variable most significant, each
// variable's values in declared domain order.
class Space {
 public:
  Space() = default;
  explicit Space(std::vector<VariableDecl> variables);

  const std::vector<VariableDecl>& variables() const { return variables_; }
  std::size_t arity() const { return variables_.size(); }

  // Number of assignments, saturating at SIZE_MAX.
  std::size_t count() const { return count_; }
  // Throws SizeLimitError when count() exceeds `cap`.
  void require_at_most(std::size_t cap, std::string_view what) const;

  std::optional<std::size_t> position(const std::string& name) const;
  std::optional<std::size_t> value_position(std::size_t variable,
                                            Value value) const;
  bool in_domain(std::size_t variable, Value value) const {
    return value_position(variable, value).has_value();
  }

  std::size_t index_of(std::span<const Value> assignment) const;
  std::vector<Value> at(std::size_t index) const;

  // Steps `assignment` to the next one in index order; false after the last.
  bool advance(std::vector<Value>& assignment) const;
  std::vector<Value> first() const;

  // "X1=0, X2=1".
  std::string describe(std::span<const Value> assignment) const;

 private:
  std::vector<VariableDecl> variables_;
  std::unordered_map<std::string, std::size_t> positions_;
  std::vector<std::unordered_map<Value, std::size_t>> value_positions_;
  std::vector<std::size_t> strides_;
  std::size_t count_ = 1;
};

// Total assignment to the exogenous variables, in declaration order.
struct Context {
  std::vector<Value> values;
  friend auto operator<=>(const Context&, const Context&) = default;
  friend bool operator==(const Context&, const Context&) = default;
};

// Total assignment to the endogenous variables, in declaration order.
struct EndoState {
  std::vector<Value> values;
  friend auto operator<=>(const EndoState&, const EndoState&) = default;
  friend bool operator==(const EndoState&, const EndoState&) = default;
};

class Signature {
 public:
  Signature() = default;
  Signature(std::vector<VariableDecl> exogenous,
            std::vector<VariableDecl> endogenous);

  const std::vector<VariableDecl>& exogenous() const {
    return exogenous_.variables();
  }
  const std::vector<VariableDecl>& endogenous() const {
    return endogenous_.variables();
  }
  const Space& contexts() const { return exogenous_; }
  const Space& states() const { return endogenous_; }

 private:
  Space exogenous_;
  Space endogenous_;
};

// The allowed-intervention component of a model: every intervention, or an
// explicit list.
class AllowedInterventions {
 public:
  static AllowedInterventions all() { return AllowedInterventions(); }
  static AllowedInterventions only(std::vector<Intervention> list);

  bool is_all() const { return all_; }
  const std::vector<Intervention>& list() const { return list_; }

  friend bool operator==(const AllowedInterventions&,
                         const AllowedInterventions&) = default;

 private:
  AllowedInterventions() = default;
  bool all_ = true;
  std::vector<Intervention> list_;
};

// Positional replacement values for endogenous variables.
using Overrides = std::vector<std::optional<Value>>;

// A finite-domain causal model. Construction never fails on semantic
// problems; call validate() to list them. Evaluation entry points throw
// InputError on cyclic models.
class CausalModel {
 public:
  CausalModel(Signature signature, std::vector<Expression> equations,
              AllowedInterventions allowed = AllowedInterventions::all());

  const Signature& signature() const { return signature_; }
  const std::vector<Expression>& equations() const { return equations_; }
  const Expression& equation(const std::string& endogenous) const;
  const AllowedInterventions& allowed() const { return allowed_; }

  CausalModel with_allowed(AllowedInterventions allowed) const;

  // The allowed list with ALL expanded.
  std::vector<Intervention> allowed_interventions(
      const Limits& limits = {}) const;

  // Topological order (positions into endogenous()), or nullopt if cyclic.
  const std::optional<std::vector<std::size_t>>& order() const {
    return order_;
  }
  // A dependency cycle as endogenous positions, first node repeated last.
  const std::vector<std::size_t>& cycle() const { return cycle_; }

  // Static parents of each endogenous variable (endogenous positions).
  const std::vector<std::vector<std::size_t>>& parents() const {
    return parents_;
  }

  // Throws InputError if `intervention` names unknown variables or values.
  Overrides overrides_for(const Intervention& intervention) const;

  EndoState solve(const Context& context, const Overrides& overrides) const;

  // Evaluates one equation with exogenous values in slots [0, nU) and
  // endogenous values in slots [nU, nU + nV).
  Value evaluate_equation(std::size_t endogenous,
                          std::span<const Value> slots) const;

 private:
  Signature signature_;
  std::vector<Expression> equations_;
  AllowedInterventions allowed_;
  std::vector<CompiledExpression> compiled_;
  std::vector<std::vector<std::size_t>> parents_;
  std::optional<std::vector<std::size_t>> order_;
  std::vector<std::size_t> cycle_;
};

// Endogenous declaration with its equation in text form.
struct EquationSpec {
  std::string name;
  std::vector<Value> domain;
  std::string equation;
};

// Parses each equation; throws InputError on syntax errors.
CausalModel make_model(std::vector<VariableDecl> exogenous,
                       const std::vector<EquationSpec>& endogenous,
                       AllowedInterventions allowed = AllowedInterventions::all());

struct Diagnostic {
  enum class Kind {
    kSignature,
    kUnknownVariable,
    kCycle,
    kOutOfDomain,
    kEvaluation,
    kIntervention,
    kTooLarge,
  };
  Kind kind;
  std::string message;
};

std::vector<Diagnostic> validate(const CausalModel& model,
                                 const Limits& limits = {});

// Throws InputError listing the diagnostics if validate() reports any.
void require_valid(const CausalModel& model, const Limits& limits = {});

// Throws InputError unless `context` is a well-typed context of `model`.
void require_context(const CausalModel& model, const Context& context);

EndoState solve(const CausalModel& model, const Context& context);
EndoState solve_under(const CausalModel& model, const Context& context,
                      const Intervention& intervention);
CausalModel apply_intervention(const CausalModel& model,
                               const Intervention& intervention);

// [prefix] body, where body is a Boolean combination of primitive events
// `X == x` over endogenous variables, built with !, && and ||.
struct CausalFormula {
  Intervention prefix;
  Expression body;

  // Parses "[X1=0,X2=1] X2 == 0 && !(X1 == 1)"; the bracket is optional.
  static CausalFormula parse(std::string_view text);
};

bool eval_formula(const CausalModel& model, const Context& context,
                  const CausalFormula& formula);

struct DependencyOrder {
  std::vector<std::string> order;  // empty when cyclic
  std::vector<std::string> cycle;  // e.g. {X1, X2, X1}; empty when acyclic
};
DependencyOrder dependency_order(const CausalModel& model);

struct UevReport {
  bool holds = false;
  // Endogenous name -> its unique exogenous variable, when `holds`.
  std::map<std::string, std::string> assignment;
  std::string witness;
};
// Dependence is read off each structural equation semantically: U belongs
// to X's support if varying U alone changes F_X for some setting of the
// other variables F_X mentions.
UevReport check_uev(const CausalModel& model, const Limits& limits = {});

std::string describe(const CausalModel& model, const Context& context);
std::string describe(const CausalModel& model, const EndoState& state);

}  // namespace cak
