#include "cak/scm.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "cak/errors.hpp"
#include "cak/interventions.hpp"

namespace cak {

Limits Limits::from_environment() {
  Limits limits;
  auto read = [](const char* name, std::size_t& target) {
    if (const char* raw = std::getenv(name)) {
      char* end = nullptr;
      unsigned long long v = std::strtoull(raw, &end, 10);
      if (end == raw || *end != '\0' || v == 0) {
        throw InputError(std::string("bad value for ") + name + ": '" + raw +
                         "'");
      }
      target = static_cast<std::size_t>(v);
    }
  };
  read("CAK_MAX_INTERVENTIONS", limits.max_interventions);
  read("CAK_MAX_CONTEXTS", limits.max_contexts);
  return limits;
}

// ---------------------------------------------------------------------------
// Space

Space::Space(std::vector<VariableDecl> variables)
    : variables_(std::move(variables)) {
  value_positions_.resize(variables_.size());
  strides_.assign(variables_.size(), 1);
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    positions_.emplace(variables_[i].name, i);
    const auto& domain = variables_[i].domain;
    for (std::size_t k = 0; k < domain.size(); ++k) {
      value_positions_[i].emplace(domain[k], k);
    }
  }
  count_ = 1;
  for (std::size_t i = variables_.size(); i-- > 0;) {
    strides_[i] = count_;
    std::size_t n = variables_[i].domain.size();
    if (n != 0 && count_ > std::numeric_limits<std::size_t>::max() / n) {
      count_ = std::numeric_limits<std::size_t>::max();
    } else if (count_ != std::numeric_limits<std::size_t>::max()) {
      count_ *= n;
    }
  }
}

void Space::require_at_most(std::size_t cap, std::string_view what) const {
  if (count_ > cap) {
    std::ostringstream os;
    os << what << " has "
       << (count_ == std::numeric_limits<std::size_t>::max()
               ? std::string("more than 2^64")
               : std::to_string(count_))
       << " assignments, above the cap of " << cap;
    throw SizeLimitError(os.str());
  }
}

std::optional<std::size_t> Space::position(const std::string& name) const {
  auto it = positions_.find(name);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Space::value_position(std::size_t variable,
                                                 Value value) const {
  const auto& positions = value_positions_[variable];
  auto it = positions.find(value);
  if (it == positions.end()) return std::nullopt;
  return it->second;
}

std::size_t Space::index_of(std::span<const Value> assignment) const {
  if (assignment.size() != variables_.size()) {
    throw InputError("assignment has the wrong number of values");
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    auto k = value_position(i, assignment[i]);
    if (!k) {
      throw InputError("value " + std::to_string(assignment[i]) +
                       " is outside the domain of " + variables_[i].name);
    }
    index += *k * strides_[i];
  }
  return index;
}

std::vector<Value> Space::at(std::size_t index) const {
  std::vector<Value> out(variables_.size());
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    out[i] = variables_[i].domain[(index / strides_[i]) %
                                  variables_[i].domain.size()];
  }
  return out;
}

std::vector<Value> Space::first() const {
  std::vector<Value> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.domain.front());
  return out;
}

bool Space::advance(std::vector<Value>& assignment) const {
  for (std::size_t i = variables_.size(); i-- > 0;) {
    const auto& domain = variables_[i].domain;
    std::size_t k = *value_position(i, assignment[i]);
    if (k + 1 < domain.size()) {
      assignment[i] = domain[k + 1];
      return true;
    }
    assignment[i] = domain.front();
  }
  return false;
}

std::string Space::describe(std::span<const Value> assignment) const {
  std::ostringstream os;
  for (std::size_t i = 0; i < variables_.size() && i < assignment.size(); ++i) {
    if (i) os << ", ";
    os << variables_[i].name << "=" << assignment[i];
  }
  return os.str();
}

Signature::Signature(std::vector<VariableDecl> exogenous,
                     std::vector<VariableDecl> endogenous)
    : exogenous_(std::move(exogenous)), endogenous_(std::move(endogenous)) {}

AllowedInterventions AllowedInterventions::only(
    std::vector<Intervention> list) {
  AllowedInterventions out;
  out.all_ = false;
  out.list_ = std::move(list);
  return out;
}

// ---------------------------------------------------------------------------
// CausalModel

CausalModel::CausalModel(Signature signature, std::vector<Expression> equations,
                         AllowedInterventions allowed)
    : signature_(std::move(signature)),
      equations_(std::move(equations)),
      allowed_(std::move(allowed)) {
  const auto& exo = signature_.contexts();
  const auto& endo = signature_.states();
  if (equations_.size() != endo.arity()) {
    throw InputError("expected one equation per endogenous variable");
  }
  const std::size_t n_exo = exo.arity();
  auto resolve = [&](const std::string& name) -> std::optional<std::size_t> {
    if (auto p = endo.position(name)) return n_exo + *p;
    if (auto p = exo.position(name)) return *p;
    return std::nullopt;
  };
  compiled_.reserve(equations_.size());
  parents_.resize(equations_.size());
  for (std::size_t i = 0; i < equations_.size(); ++i) {
    compiled_.emplace_back(equations_[i], resolve);
    for (const auto& name : equations_[i].variables()) {
      if (auto p = endo.position(name)) parents_[i].push_back(*p);
    }
    std::sort(parents_[i].begin(), parents_[i].end());
  }

  // Kahn's algorithm, ties broken by declaration order.
  const std::size_t n = equations_.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p : parents_[i]) {
      ++indegree[i];
      children[p].push_back(i);
    }
  }
  std::priority_queue<std::size_t, std::vector<std::size_t>,
                      std::greater<std::size_t>>
      ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    for (std::size_t c : children[v])
      if (--indegree[c] == 0) ready.push(c);
  }
  if (order.size() == n) {
    order_ = std::move(order);
    return;
  }

  // Find a cycle among the remaining nodes: walk parent edges from the
  // smallest unresolved node until a node repeats.
  std::vector<bool> remaining(n, false);
  for (std::size_t i = 0; i < n; ++i) remaining[i] = indegree[i] > 0;
  std::size_t start = 0;
  while (!remaining[start]) ++start;
  std::vector<std::size_t> walk;
  std::vector<std::size_t> seen_at(n, std::numeric_limits<std::size_t>::max());
  std::size_t v = start;
  while (seen_at[v] == std::numeric_limits<std::size_t>::max()) {
    seen_at[v] = walk.size();
    walk.push_back(v);
    for (std::size_t p : parents_[v]) {
      if (remaining[p]) {
        v = p;
        break;
      }
    }
  }
  // The walk follows parent edges, so each arrow reads "depends on".
  std::vector<std::size_t> loop(walk.begin() + static_cast<std::ptrdiff_t>(seen_at[v]),
                                walk.end());
  auto smallest = std::min_element(loop.begin(), loop.end());
  std::rotate(loop.begin(), smallest, loop.end());
  loop.push_back(loop.front());
  cycle_ = std::move(loop);
}

const Expression& CausalModel::equation(const std::string& endogenous) const {
  auto p = signature_.states().position(endogenous);
  if (!p) throw InputError("unknown endogenous variable '" + endogenous + "'");
  return equations_[*p];
}

CausalModel CausalModel::with_allowed(AllowedInterventions allowed) const {
  CausalModel copy = *this;
  copy.allowed_ = std::move(allowed);
  return copy;
}

std::vector<Intervention> CausalModel::allowed_interventions(
    const Limits& limits) const {
  if (allowed_.is_all()) return enumerate_all(*this, limits);
  return allowed_.list();
}

Overrides CausalModel::overrides_for(const Intervention& intervention) const {
  const auto& endo = signature_.states();
  Overrides out(endo.arity());
  for (const auto& [name, value] : intervention.assignments()) {
    auto p = endo.position(name);
    if (!p) {
      throw InputError("intervention on unknown endogenous variable '" + name +
                       "'");
    }
    if (!endo.in_domain(*p, value)) {
      throw InputError("intervention value " + std::to_string(value) +
                       " is outside the domain of " + name);
    }
    out[*p] = value;
  }
  return out;
}

Value CausalModel::evaluate_equation(std::size_t endogenous,
                                     std::span<const Value> slots) const {
  return compiled_[endogenous].evaluate(slots);
}

EndoState CausalModel::solve(const Context& context,
                             const Overrides& overrides) const {
  if (!order_) {
    throw InputError("model is cyclic; no unique solution");
  }
  const std::size_t n_exo = signature_.contexts().arity();
  const std::size_t n_endo = signature_.states().arity();
  std::vector<Value> slots(n_exo + n_endo, 0);
  std::copy(context.values.begin(), context.values.end(), slots.begin());
  for (std::size_t v : *order_) {
    slots[n_exo + v] =
        overrides[v] ? *overrides[v] : compiled_[v].evaluate(slots);
  }
  return EndoState{std::vector<Value>(slots.begin() + static_cast<std::ptrdiff_t>(n_exo),
                                      slots.end())};
}

// ---------------------------------------------------------------------------
// validate

namespace {

void check_decls(const std::vector<VariableDecl>& decls, const char* role,
                 std::set<std::string>& names, std::vector<Diagnostic>& out) {
  for (const auto& d : decls) {
    if (!names.insert(d.name).second) {
      out.push_back({Diagnostic::Kind::kSignature,
                     "duplicate variable name '" + d.name + "'"});
    }
    if (d.domain.empty()) {
      out.push_back({Diagnostic::Kind::kSignature,
                     std::string(role) + " variable '" + d.name +
                         "' has an empty domain"});
    }
    std::set<Value> seen(d.domain.begin(), d.domain.end());
    if (seen.size() != d.domain.size()) {
      out.push_back({Diagnostic::Kind::kSignature,
                     std::string(role) + " variable '" + d.name +
                         "' repeats a domain value"});
    }
  }
}

}  // namespace

std::vector<Diagnostic> validate(const CausalModel& model,
                                 const Limits& limits) {
  std::vector<Diagnostic> out;
  const auto& sig = model.signature();
  std::set<std::string> names;
  check_decls(sig.exogenous(), "exogenous", names, out);
  check_decls(sig.endogenous(), "endogenous", names, out);
  bool signature_ok = out.empty();

  const auto& exo = sig.contexts();
  const auto& endo = sig.states();
  bool names_ok = true;
  for (std::size_t i = 0; i < model.equations().size(); ++i) {
    for (const auto& name : model.equations()[i].variables()) {
      if (!exo.position(name) && !endo.position(name)) {
        names_ok = false;
        out.push_back({Diagnostic::Kind::kUnknownVariable,
                       "equation for " + sig.endogenous()[i].name +
                           " mentions unknown variable '" + name + "'"});
      }
    }
  }

  if (!model.order()) {
    std::ostringstream os;
    os << "cycle: ";
    for (std::size_t k = 0; k < model.cycle().size(); ++k) {
      if (k) os << "→";
      os << sig.endogenous()[model.cycle()[k]].name;
    }
    out.push_back({Diagnostic::Kind::kCycle, os.str()});
  }

  // Range check: every equation on every setting of the variables it reads.
  if (signature_ok && names_ok) {
    const std::size_t n_exo = exo.arity();
    for (std::size_t i = 0; i < model.equations().size(); ++i) {
      std::vector<VariableDecl> refs;
      std::vector<std::size_t> slots_of_refs;
      for (const auto& name : model.equations()[i].variables()) {
        if (auto p = exo.position(name)) {
          refs.push_back(sig.exogenous()[*p]);
          slots_of_refs.push_back(*p);
        } else if (auto q = endo.position(name)) {
          refs.push_back(sig.endogenous()[*q]);
          slots_of_refs.push_back(n_exo + *q);
        }
      }
      Space inputs(refs);
      const std::string& target = sig.endogenous()[i].name;
      if (inputs.count() > limits.max_contexts) {
        out.push_back({Diagnostic::Kind::kTooLarge,
                       "equation for " + target +
                           " reads too many input combinations to check"});
        continue;
      }
      std::vector<Value> slots(n_exo + endo.arity(), 0);
      std::vector<Value> a = inputs.first();
      do {
        for (std::size_t k = 0; k < a.size(); ++k) slots[slots_of_refs[k]] = a[k];
        try {
          Value v = model.evaluate_equation(i, slots);
          if (!endo.in_domain(i, v)) {
            std::ostringstream os;
            os << "equation for " << target << " yields " << v
               << " outside its domain at " << inputs.describe(a);
            out.push_back({Diagnostic::Kind::kOutOfDomain, os.str()});
            break;
          }
        } catch (const EvaluationError& e) {
          out.push_back({Diagnostic::Kind::kEvaluation,
                         "equation for " + target + " fails at " +
                             inputs.describe(a) + ": " + e.what()});
          break;
        }
      } while (inputs.advance(a));
    }
  }

  if (!model.allowed().is_all()) {
    std::set<Intervention> seen;
    for (const auto& i : model.allowed().list()) {
      try {
        model.overrides_for(i);
      } catch (const InputError& e) {
        out.push_back({Diagnostic::Kind::kIntervention,
                       "allowed intervention {" + i.to_string() +
                           "} is malformed: " + e.what()});
      }
      if (!seen.insert(i).second) {
        out.push_back({Diagnostic::Kind::kIntervention,
                       "allowed intervention {" + i.to_string() +
                           "} is listed twice"});
      }
    }
  }
  return out;
}

void require_valid(const CausalModel& model, const Limits& limits) {
  auto diagnostics = validate(model, limits);
  if (diagnostics.empty()) return;
  std::string message = "invalid model:";
  for (const auto& d : diagnostics) message += "\n  " + d.message;
  throw InputError(message);
}

void require_context(const CausalModel& model, const Context& context) {
  const auto& exo = model.signature().contexts();
  if (context.values.size() != exo.arity()) {
    throw InputError("context has " + std::to_string(context.values.size()) +
                     " values, model has " + std::to_string(exo.arity()) +
                     " exogenous variables");
  }
  for (std::size_t i = 0; i < exo.arity(); ++i) {
    if (!exo.in_domain(i, context.values[i])) {
      throw InputError("context value " + std::to_string(context.values[i]) +
                       " is outside the domain of " + exo.variables()[i].name);
    }
  }
}

EndoState solve(const CausalModel& model, const Context& context) {
  require_context(model, context);
  return model.solve(context, Overrides(model.signature().states().arity()));
}

EndoState solve_under(const CausalModel& model, const Context& context,
                      const Intervention& intervention) {
  require_context(model, context);
  return model.solve(context, model.overrides_for(intervention));
}

CausalModel apply_intervention(const CausalModel& model,
                               const Intervention& intervention) {
  Overrides overrides = model.overrides_for(intervention);
  std::vector<Expression> equations = model.equations();
  for (std::size_t i = 0; i < equations.size(); ++i) {
    if (overrides[i]) equations[i] = Expression::literal(*overrides[i]);
  }
  return CausalModel(model.signature(), std::move(equations), model.allowed());
}

// ---------------------------------------------------------------------------
// Causal formulas

namespace {

void require_event_structure(const Expression& e) {
  using K = Expression::Kind;
  using B = Expression::BinaryOp;
  switch (e.kind()) {
    case K::kUnary:
      if (e.unary_op() == Expression::UnaryOp::kNot) {
        require_event_structure(e.operands()[0]);
        return;
      }
      break;
    case K::kBinary:
      if (e.binary_op() == B::kAnd || e.binary_op() == B::kOr) {
        require_event_structure(e.operands()[0]);
        require_event_structure(e.operands()[1]);
        return;
      }
      if (e.binary_op() == B::kEq &&
          e.operands()[0].kind() == K::kVariable &&
          e.operands()[1].kind() == K::kLiteral) {
        return;
      }
      break;
    default:
      break;
  }
  throw InputError("'" + e.to_string() +
                   "' is not a Boolean combination of events X == x");
}

}  // namespace

CausalFormula CausalFormula::parse(std::string_view text) {
  Intervention prefix;
  std::string_view rest = text;
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  if (!rest.empty() && rest.front() == '[') {
    std::size_t close = rest.find(']');
    if (close == std::string_view::npos) {
      throw InputError("unterminated intervention prefix in '" +
                       std::string(text) + "'");
    }
    prefix = Intervention::parse(rest.substr(1, close - 1));
    rest = rest.substr(close + 1);
  }
  CausalFormula f{std::move(prefix), Expression::parse(rest)};
  require_event_structure(f.body);
  return f;
}

bool eval_formula(const CausalModel& model, const Context& context,
                  const CausalFormula& formula) {
  require_event_structure(formula.body);
  const auto& endo = model.signature().states();
  for (const auto& name : formula.body.variables()) {
    if (!endo.position(name)) {
      throw InputError("formula mentions unknown endogenous variable '" +
                       name + "'");
    }
  }
  EndoState state = solve_under(model, context, formula.prefix);
  CompiledExpression body(
      formula.body,
      [&](const std::string& name) { return endo.position(name); });
  return body.evaluate(state.values) != 0;
}

DependencyOrder dependency_order(const CausalModel& model) {
  DependencyOrder out;
  const auto& endo = model.signature().endogenous();
  if (model.order()) {
    for (std::size_t v : *model.order()) out.order.push_back(endo[v].name);
  } else {
    for (std::size_t v : model.cycle()) out.cycle.push_back(endo[v].name);
  }
  return out;
}

CausalModel make_model(std::vector<VariableDecl> exogenous,
                       const std::vector<EquationSpec>& endogenous,
                       AllowedInterventions allowed) {
  std::vector<VariableDecl> decls;
  std::vector<Expression> equations;
  for (const auto& e : endogenous) {
    decls.push_back({e.name, e.domain});
    try {
      equations.push_back(Expression::parse(e.equation));
    } catch (const InputError& err) {
      throw InputError("equation for " + e.name + ": " + err.what());
    }
  }
  return CausalModel(Signature(std::move(exogenous), std::move(decls)),
                     std::move(equations), std::move(allowed));
}

// ---------------------------------------------------------------------------
// uev

UevReport check_uev(const CausalModel& model, const Limits& limits) {
  require_valid(model, limits);
  const auto& sig = model.signature();
  const auto& exo = sig.contexts();
  const auto& endo = sig.states();
  const std::size_t n_exo = exo.arity();

  // support[i]: exogenous positions whose value alone can change F_i.
  std::vector<std::vector<std::size_t>> support(endo.arity());
  for (std::size_t i = 0; i < endo.arity(); ++i) {
    std::vector<VariableDecl> refs;
    std::vector<std::size_t> slots_of_refs;
    std::vector<std::size_t> exo_refs;  // positions within refs
    for (const auto& name : model.equations()[i].variables()) {
      if (auto p = exo.position(name)) {
        exo_refs.push_back(refs.size());
        refs.push_back(sig.exogenous()[*p]);
        slots_of_refs.push_back(*p);
      } else if (auto q = endo.position(name)) {
        refs.push_back(sig.endogenous()[*q]);
        slots_of_refs.push_back(n_exo + *q);
      }
    }
    if (exo_refs.empty()) continue;
    Space inputs(refs);
    inputs.require_at_most(limits.max_contexts,
                           "inputs of the equation for " + endo.variables()[i].name);
    std::vector<Value> outputs(inputs.count());
    std::vector<Value> slots(n_exo + endo.arity(), 0);
    std::vector<Value> a = inputs.first();
    std::size_t index = 0;
    do {
      for (std::size_t k = 0; k < a.size(); ++k) slots[slots_of_refs[k]] = a[k];
      outputs[index++] = model.evaluate_equation(i, slots);
    } while (inputs.advance(a));
    for (std::size_t r : exo_refs) {
      std::map<std::vector<Value>, Value> by_rest;
      bool depends = false;
      for (std::size_t idx = 0; idx < outputs.size() && !depends; ++idx) {
        std::vector<Value> rest = inputs.at(idx);
        rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(r));
        auto [it, inserted] = by_rest.emplace(std::move(rest), outputs[idx]);
        if (!inserted && it->second != outputs[idx]) depends = true;
      }
      if (depends) support[i].push_back(slots_of_refs[r]);
    }
    std::sort(support[i].begin(), support[i].end());
  }

  UevReport report;
  std::map<std::size_t, std::size_t> owner;  // exogenous -> endogenous
  for (std::size_t i = 0; i < endo.arity(); ++i) {
    const auto& name = endo.variables()[i].name;
    if (support[i].size() > 1) {
      report.witness = name + " depends on both " +
                       exo.variables()[support[i][0]].name + " and " +
                       exo.variables()[support[i][1]].name;
      return report;
    }
    if (support[i].size() == 1) {
      std::size_t u = support[i][0];
      auto [it, inserted] = owner.emplace(u, i);
      if (!inserted) {
        report.witness = exo.variables()[u].name + " is shared by " +
                         endo.variables()[it->second].name + " and " + name;
        return report;
      }
      report.assignment[name] = exo.variables()[u].name;
    }
  }
  // Variables with no exogenous dependence take an unused exogenous variable.
  std::size_t next_free = 0;
  for (std::size_t i = 0; i < endo.arity(); ++i) {
    if (!support[i].empty()) continue;
    while (next_free < n_exo && owner.count(next_free)) ++next_free;
    if (next_free == n_exo) {
      report.assignment.clear();
      report.witness = "no unused exogenous variable is left for " +
                       endo.variables()[i].name;
      return report;
    }
    owner.emplace(next_free, i);
    report.assignment[endo.variables()[i].name] =
        exo.variables()[next_free].name;
  }
  report.holds = true;
  return report;
}

std::string describe(const CausalModel& model, const Context& context) {
  return model.signature().contexts().describe(context.values);
}

std::string describe(const CausalModel& model, const EndoState& state) {
  return model.signature().states().describe(state.values);
}

}  // namespace cak
