#include "cak/intervention.hpp"

#include <cctype>
#include <cstdlib>
#include <sstream>

#include "cak/errors.hpp"

namespace cak {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

Value parse_value(std::string_view text, std::string_view whole) {
  std::string s(trim(text));
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (s.empty() || end != s.c_str() + s.size()) {
    throw InputError("bad value '" + s + "' in assignment '" +
                     std::string(whole) + "'");
  }
  return v;
}

}  // namespace

Intervention Intervention::parse(std::string_view text) {
  std::map<std::string, Value> out;
  std::string_view rest = trim(text);
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{}
                                           : rest.substr(comma + 1);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("expected NAME=VALUE in '" + std::string(text) + "'");
    }
    std::string name(trim(item.substr(0, eq)));
    if (name.empty()) {
      throw InputError("missing variable name in '" + std::string(text) + "'");
    }
    Value v = parse_value(item.substr(eq + 1), text);
    if (!out.emplace(name, v).second) {
      throw InputError("variable '" + name + "' assigned twice in '" +
                       std::string(text) + "'");
    }
  }
  return Intervention(std::move(out));
}

std::optional<Value> Intervention::value(const std::string& variable) const {
  auto it = assignments_.find(variable);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> Intervention::variables() const {
  std::set<std::string> out;
  for (const auto& [name, v] : assignments_) out.insert(name);
  return out;
}

Intervention Intervention::merged_with(const Intervention& other) const {
  auto merged = assignments_;
  for (const auto& [name, v] : other.assignments_) {
    if (!merged.emplace(name, v).second) {
      throw InputError("interventions overlap on '" + name + "'");
    }
  }
  return Intervention(std::move(merged));
}

std::string Intervention::to_string() const {
  if (assignments_.empty()) return "∅";
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, v] : assignments_) {
    if (!first) os << ", ";
    first = false;
    os << name << "←" << v;
  }
  return os.str();
}

bool natural_leq(const Intervention& lhs, const Intervention& rhs) {
  if (lhs.size() > rhs.size()) return false;
  for (const auto& [name, v] : lhs.assignments()) {
    auto other = rhs.value(name);
    if (!other || *other != v) return false;
  }
  return true;
}

}  // namespace cak
