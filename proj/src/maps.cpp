#include "cak/maps.hpp"

#include "cak/errors.hpp"

namespace cak {

VariableMap::VariableMap(Space source, Space target, const Limits& limits)
    : source_(std::move(source)), target_(std::move(target)) {
  source_.require_at_most(limits.max_contexts, "map source space");
  target_.require_at_most(limits.max_contexts, "map target space");
  image_.assign(source_.count(), kUndefined);
}

VariableMap VariableMap::from_table(Space source, Space target,
                                    const std::vector<Row>& rows,
                                    const Limits& limits) {
  VariableMap m(std::move(source), std::move(target), limits);
  for (const auto& [from, to] : rows) {
    std::size_t s = m.source_.index_of(from);
    std::size_t t = m.target_.index_of(to);
    if (m.image_[s] != kUndefined) {
      throw InputError("map lists " + m.source_.describe(from) + " twice");
    }
    m.image_[s] = t;
  }
  return m;
}

VariableMap VariableMap::from_expressions(
    Space source, Space target,
    const std::map<std::string, Expression>& expressions,
    const Limits& limits) {
  VariableMap m(std::move(source), std::move(target), limits);
  std::vector<CompiledExpression> compiled;
  for (const auto& decl : m.target_.variables()) {
    auto it = expressions.find(decl.name);
    if (it == expressions.end()) {
      throw InputError("map has no expression for '" + decl.name + "'");
    }
    compiled.emplace_back(it->second, [&](const std::string& name) {
      return m.source_.position(name);
    });
    if (!compiled.back().unresolved().empty()) {
      throw InputError("expression for '" + decl.name +
                       "' mentions unknown variable '" +
                       compiled.back().unresolved().front() + "'");
    }
  }
  for (const auto& [name, e] : expressions) {
    if (!m.target_.position(name)) {
      throw InputError("map has an expression for unknown variable '" + name +
                       "'");
    }
  }
  std::vector<Value> a = m.source_.first();
  std::vector<Value> out(m.target_.arity());
  std::size_t index = 0;
  do {
    for (std::size_t k = 0; k < compiled.size(); ++k) {
      out[k] = compiled[k].evaluate(a);
    }
    m.image_[index++] = m.target_.index_of(out);
  } while (m.source_.advance(a));
  m.expressions_ = expressions;
  return m;
}

VariableMap VariableMap::from_function(
    Space source, Space target,
    const std::function<std::vector<Value>(std::span<const Value>)>& f,
    const Limits& limits) {
  VariableMap m(std::move(source), std::move(target), limits);
  std::vector<Value> a = m.source_.first();
  std::size_t index = 0;
  do {
    m.image_[index++] = m.target_.index_of(f(a));
  } while (m.source_.advance(a));
  return m;
}

bool VariableMap::is_total() const {
  for (std::size_t t : image_)
    if (t == kUndefined) return false;
  return true;
}

std::optional<std::vector<Value>> VariableMap::first_undefined() const {
  for (std::size_t s = 0; s < image_.size(); ++s) {
    if (image_[s] == kUndefined) return source_.at(s);
  }
  return std::nullopt;
}

std::vector<Value> VariableMap::apply(std::span<const Value> from) const {
  std::size_t t = image_[source_.index_of(from)];
  if (t == kUndefined) {
    throw InputError("map is undefined on " + source_.describe(from));
  }
  return target_.at(t);
}

std::vector<std::vector<Value>> VariableMap::missed_targets() const {
  std::vector<bool> hit(target_.count(), false);
  for (std::size_t t : image_)
    if (t != kUndefined) hit[t] = true;
  std::vector<std::vector<Value>> out;
  for (std::size_t t = 0; t < hit.size(); ++t)
    if (!hit[t]) out.push_back(target_.at(t));
  return out;
}

std::vector<VariableMap::Row> VariableMap::rows() const {
  std::vector<Row> out;
  for (std::size_t s = 0; s < image_.size(); ++s) {
    if (image_[s] != kUndefined)
      out.emplace_back(source_.at(s), target_.at(image_[s]));
  }
  return out;
}

StateMap StateMap::identity(const Space& states, const Limits& limits) {
  return StateMap(VariableMap::from_function(
      states, states,
      [](std::span<const Value> v) {
        return std::vector<Value>(v.begin(), v.end());
      },
      limits));
}

void require_same_variables(const std::vector<VariableDecl>& expected,
                            const std::vector<VariableDecl>& actual,
                            const std::string& what) {
  if (expected == actual) return;
  std::string message = what + ": expected variables (";
  for (std::size_t i = 0; i < expected.size(); ++i)
    message += (i ? ", " : "") + expected[i].name;
  message += ") but got (";
  for (std::size_t i = 0; i < actual.size(); ++i)
    message += (i ? ", " : "") + actual[i].name;
  message += ") or domains differ";
  throw InputError(message);
}

}  // namespace cak
