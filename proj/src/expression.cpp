#include "cak/expression.hpp"

#include <cctype>
#include <sstream>
#include <utility>

#include "cak/errors.hpp"

namespace cak {

struct Expression::Node {
  Kind kind;
  Value value = 0;
  std::string name;
  UnaryOp unary_op = UnaryOp::kNegate;
  BinaryOp binary_op = BinaryOp::kAdd;
  std::vector<Expression> children;
  Table table;
};

Expression::Expression(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

Expression Expression::literal(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kLiteral;
  n->value = v;
  return Expression(std::move(n));
}

Expression Expression::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kVariable;
  n->name = std::move(name);
  return Expression(std::move(n));
}

Expression Expression::unary(UnaryOp op, Expression operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kUnary;
  n->unary_op = op;
  n->children.push_back(std::move(operand));
  return Expression(std::move(n));
}

Expression Expression::binary(BinaryOp op, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kBinary;
  n->binary_op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expression(std::move(n));
}

Expression Expression::ite(Expression cond, Expression then_branch,
                           Expression else_branch) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::kIte;
  n->children = {std::move(cond), std::move(then_branch),
                 std::move(else_branch)};
  return Expression(std::move(n));
}

Expression Expression::table(std::vector<Expression> keys, Table t) {
  if (keys.empty()) throw InputError("table needs at least one key");
  for (const auto& [tuple, out] : t.rows) {
    if (tuple.size() != keys.size()) {
      throw InputError("table row arity does not match its key list");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::kTable;
  n->children = std::move(keys);
  n->table = std::move(t);
  return Expression(std::move(n));
}

Expression::Kind Expression::kind() const { return node_->kind; }
Value Expression::literal_value() const { return node_->value; }
const std::string& Expression::variable_name() const { return node_->name; }
Expression::UnaryOp Expression::unary_op() const { return node_->unary_op; }
Expression::BinaryOp Expression::binary_op() const { return node_->binary_op; }
const Expression::Table& Expression::table_data() const { return node_->table; }
std::span<const Expression> Expression::operands() const {
  return node_->children;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expression::Kind::kLiteral:
      return x.value == y.value;
    case Expression::Kind::kVariable:
      return x.name == y.name;
    case Expression::Kind::kUnary:
      if (x.unary_op != y.unary_op) return false;
      break;
    case Expression::Kind::kBinary:
      if (x.binary_op != y.binary_op) return false;
      break;
    case Expression::Kind::kIte:
      break;
    case Expression::Kind::kTable:
      if (x.table.rows != y.table.rows || x.table.fallback != y.table.fallback)
        return false;
      break;
  }
  return x.children == y.children;
}

namespace {

const char* op_text(Expression::BinaryOp op) {
  using B = Expression::BinaryOp;
  switch (op) {
    case B::kAdd: return "+";
    case B::kSub: return "-";
    case B::kMul: return "*";
    case B::kEq: return "==";
    case B::kNe: return "!=";
    case B::kLt: return "<";
    case B::kLe: return "<=";
    case B::kGt: return ">";
    case B::kGe: return ">=";
    case B::kAnd: return "&&";
    case B::kOr: return "||";
  }
  return "?";
}

void print(const Expression& e, std::ostream& out, bool nested) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::kLiteral:
      if (nested && e.literal_value() < 0) {
        out << '(' << e.literal_value() << ')';
      } else {
        out << e.literal_value();
      }
      return;
    case K::kVariable:
      out << e.variable_name();
      return;
    case K::kUnary: {
      out << (e.unary_op() == Expression::UnaryOp::kNot ? "!" : "-");
      const auto& operand = e.operands()[0];
      bool wrap = operand.kind() == K::kBinary ||
                  operand.kind() == K::kUnary ||
                  operand.kind() == K::kLiteral;
      if (wrap) out << '(';
      print(operand, out, false);
      if (wrap) out << ')';
      return;
    }
    case K::kBinary:
      if (nested) out << '(';
      print(e.operands()[0], out, true);
      out << ' ' << op_text(e.binary_op()) << ' ';
      print(e.operands()[1], out, true);
      if (nested) out << ')';
      return;
    case K::kIte:
      out << "ite(";
      print(e.operands()[0], out, false);
      out << ", ";
      print(e.operands()[1], out, false);
      out << ", ";
      print(e.operands()[2], out, false);
      out << ')';
      return;
    case K::kTable: {
      out << "table(";
      for (std::size_t i = 0; i < e.operands().size(); ++i) {
        if (i) out << ", ";
        print(e.operands()[i], out, false);
      }
      out << ")[";
      bool first = true;
      for (const auto& [tuple, result] : e.table_data().rows) {
        if (!first) out << ", ";
        first = false;
        out << '(';
        for (std::size_t i = 0; i < tuple.size(); ++i) {
          if (i) out << ", ";
          out << tuple[i];
        }
        out << ") -> " << result;
      }
      if (e.table_data().fallback) {
        if (!first) out << ", ";
        out << "_ -> " << *e.table_data().fallback;
      }
      out << ']';
      return;
    }
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse_all() {
    Expression e = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream os;
    os << "cannot parse expression '" << text_ << "' at offset " << pos_
       << ": " << message;
    throw InputError(os.str());
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view token) {
    if (!accept(token)) fail("expected '" + std::string(token) + "'");
  }

  bool peek_identifier_start() {
    skip_space();
    return pos_ < text_.size() &&
           (std::isalpha(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_');
  }

  std::string identifier() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  bool peek_digit() {
    skip_space();
    return pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]));
  }

  Value integer() {
    skip_space();
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    if (!peek_digit()) fail("expected integer");
    Value v = 0;
    while (pos_ < text_.size() &&
           std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (__builtin_mul_overflow(v, 10, &v) ||
          __builtin_add_overflow(v, text_[pos_] - '0', &v))
        fail("integer literal overflows");
      ++pos_;
    }
    return negative ? -v : v;
  }

  Expression parse_or() {
    Expression lhs = parse_and();
    while (accept("||")) {
      lhs = Expression::binary(Expression::BinaryOp::kOr, lhs, parse_and());
    }
    return lhs;
  }

  Expression parse_and() {
    Expression lhs = parse_cmp();
    while (accept("&&")) {
      lhs = Expression::binary(Expression::BinaryOp::kAnd, lhs, parse_cmp());
    }
    return lhs;
  }

  Expression parse_cmp() {
    using B = Expression::BinaryOp;
    Expression lhs = parse_sum();
    // Two-character operators first.
    static constexpr std::pair<std::string_view, B> kOps[] = {
        {"==", B::kEq}, {"!=", B::kNe}, {"<=", B::kLe},
        {">=", B::kGe}, {"<", B::kLt},  {">", B::kGt}};
    for (const auto& [text, op] : kOps) {
      if (accept(text)) return Expression::binary(op, lhs, parse_sum());
    }
    return lhs;
  }

  Expression parse_sum() {
    Expression lhs = parse_product();
    for (;;) {
      skip_space();
      if (accept("+")) {
        lhs = Expression::binary(Expression::BinaryOp::kAdd, lhs,
                                 parse_product());
      } else if (text_.substr(pos_, 2) != "->" && accept("-")) {
        lhs = Expression::binary(Expression::BinaryOp::kSub, lhs,
                                 parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expression parse_product() {
    Expression lhs = parse_unary();
    while (accept("*")) {
      lhs = Expression::binary(Expression::BinaryOp::kMul, lhs, parse_unary());
    }
    return lhs;
  }

  Expression parse_unary() {
    skip_space();
    if (text_.substr(pos_, 2) != "!=" && accept("!")) {
      return Expression::unary(Expression::UnaryOp::kNot, parse_unary());
    }
    if (accept("-")) {
      if (peek_digit()) return Expression::literal(-integer());
      return Expression::unary(Expression::UnaryOp::kNegate, parse_unary());
    }
    return parse_primary();
  }

  Expression parse_primary() {
    if (peek_digit()) return Expression::literal(integer());
    if (accept("(")) {
      Expression inner = parse_or();
      expect(")");
      return inner;
    }
    if (!peek_identifier_start()) fail("expected a term");
    std::size_t save = pos_;
    std::string name = identifier();
    if (name == "ite" && accept("(")) {
      Expression c = parse_or();
      expect(",");
      Expression a = parse_or();
      expect(",");
      Expression b = parse_or();
      expect(")");
      return Expression::ite(c, a, b);
    }
    if (name == "table" && accept("(")) return parse_table();
    if (name == "_") {
      pos_ = save;
      fail("'_' is only valid as a table fallback");
    }
    return Expression::variable(std::move(name));
  }

  std::vector<Value> tuple() {
    std::vector<Value> values;
    if (accept("(")) {
      values.push_back(integer());
      while (accept(",")) values.push_back(integer());
      expect(")");
    } else {
      values.push_back(integer());
    }
    return values;
  }

  Expression parse_table() {
    std::vector<Expression> keys;
    keys.push_back(parse_or());
    while (accept(",")) keys.push_back(parse_or());
    expect(")");
    expect("[");
    Expression::Table t;
    if (!accept("]")) {
      do {
        skip_space();
        if (accept("_")) {
          expect("->");
          if (t.fallback) fail("duplicate table fallback");
          t.fallback = integer();
          continue;
        }
        std::vector<Value> key = tuple();
        if (key.size() != keys.size()) fail("table row arity mismatch");
        expect("->");
        Value out = integer();
        if (!t.rows.emplace(std::move(key), out).second)
          fail("duplicate table row");
      } while (accept(","));
      expect("]");
    }
    return Expression::table(std::move(keys), std::move(t));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_variables(const Expression& e, std::set<std::string>& out) {
  if (e.kind() == Expression::Kind::kVariable) {
    out.insert(e.variable_name());
    return;
  }
  for (const auto& child : e.operands()) collect_variables(child, out);
}

}  // namespace

Expression Expression::parse(std::string_view text) {
  return Parser(text).parse_all();
}

std::string Expression::to_string() const {
  std::ostringstream os;
  print(*this, os, false);
  return os.str();
}

std::set<std::string> Expression::variables() const {
  std::set<std::string> out;
  collect_variables(*this, out);
  return out;
}

Expression Expression::substitute(
    const std::map<std::string, Expression>& replacements) const {
  switch (kind()) {
    case Kind::kLiteral:
      return *this;
    case Kind::kVariable: {
      auto it = replacements.find(variable_name());
      return it == replacements.end() ? *this : it->second;
    }
    default:
      break;
  }
  auto n = std::make_shared<Node>(*node_);
  for (auto& child : n->children) child = child.substitute(replacements);
  return Expression(std::move(n));
}

// ---------------------------------------------------------------------------

CompiledExpression::CompiledExpression(const Expression& expr,
                                       const Resolver& resolve) {
  emit(expr, resolve);
}

void CompiledExpression::emit(const Expression& e, const Resolver& resolve) {
  using K = Expression::Kind;
  using B = Expression::BinaryOp;
  switch (e.kind()) {
    case K::kLiteral:
      code_.push_back({Op::kPush, e.literal_value()});
      return;
    case K::kVariable: {
      if (auto slot = resolve(e.variable_name())) {
        code_.push_back({Op::kLoad, static_cast<std::int64_t>(*slot)});
      } else {
        code_.push_back({Op::kUnresolved,
                         static_cast<std::int64_t>(unresolved_.size())});
        unresolved_.push_back(e.variable_name());
      }
      return;
    }
    case K::kUnary:
      emit(e.operands()[0], resolve);
      code_.push_back(
          {e.unary_op() == Expression::UnaryOp::kNot ? Op::kNot : Op::kNeg, 0});
      return;
    case K::kBinary: {
      emit(e.operands()[0], resolve);
      emit(e.operands()[1], resolve);
      Op op = Op::kAdd;
      switch (e.binary_op()) {
        case B::kAdd: op = Op::kAdd; break;
        case B::kSub: op = Op::kSub; break;
        case B::kMul: op = Op::kMul; break;
        case B::kEq: op = Op::kEq; break;
        case B::kNe: op = Op::kNe; break;
        case B::kLt: op = Op::kLt; break;
        case B::kLe: op = Op::kLe; break;
        case B::kGt: op = Op::kGt; break;
        case B::kGe: op = Op::kGe; break;
        case B::kAnd: op = Op::kAnd; break;
        case B::kOr: op = Op::kOr; break;
      }
      code_.push_back({op, 0});
      return;
    }
    case K::kIte: {
      emit(e.operands()[0], resolve);
      std::size_t jump_else = code_.size();
      code_.push_back({Op::kJumpIfZero, 0});
      emit(e.operands()[1], resolve);
      std::size_t jump_end = code_.size();
      code_.push_back({Op::kJump, 0});
      code_[jump_else].arg = static_cast<std::int64_t>(code_.size());
      emit(e.operands()[2], resolve);
      code_[jump_end].arg = static_cast<std::int64_t>(code_.size());
      return;
    }
    case K::kTable: {
      for (const auto& key : e.operands()) emit(key, resolve);
      std::string description = e.to_string();
      if (description.size() > 60) description = description.substr(0, 57) + "...";
      tables_.push_back({e.operands().size(), e.table_data().rows,
                         e.table_data().fallback, std::move(description)});
      code_.push_back(
          {Op::kTable, static_cast<std::int64_t>(tables_.size() - 1)});
      return;
    }
  }
}

Value CompiledExpression::evaluate(std::span<const Value> slots) const {
  std::vector<Value> stack;
  stack.reserve(8);
  auto pop = [&stack] {
    Value v = stack.back();
    stack.pop_back();
    return v;
  };
  auto overflow = [] { throw EvaluationError("integer overflow in expression"); };
  std::size_t pc = 0;
  while (pc < code_.size()) {
    const Instr& in = code_[pc++];
    switch (in.op) {
      case Op::kPush:
        stack.push_back(in.arg);
        break;
      case Op::kLoad:
        stack.push_back(slots[static_cast<std::size_t>(in.arg)]);
        break;
      case Op::kUnresolved:
        throw EvaluationError("unknown variable '" +
                              unresolved_[static_cast<std::size_t>(in.arg)] +
                              "'");
      case Op::kNeg: {
        Value v = pop();
        Value r;
        if (__builtin_sub_overflow(Value{0}, v, &r)) overflow();
        stack.push_back(r);
        break;
      }
      case Op::kNot:
        stack.push_back(pop() == 0 ? 1 : 0);
        break;
      case Op::kJumpIfZero:
        if (pop() == 0) pc = static_cast<std::size_t>(in.arg);
        break;
      case Op::kJump:
        pc = static_cast<std::size_t>(in.arg);
        break;
      case Op::kTable: {
        const auto& t = tables_[static_cast<std::size_t>(in.arg)];
        std::vector<Value> key(stack.end() - static_cast<std::ptrdiff_t>(t.arity),
                               stack.end());
        stack.resize(stack.size() - t.arity);
        auto it = t.rows.find(key);
        if (it != t.rows.end()) {
          stack.push_back(it->second);
        } else if (t.fallback) {
          stack.push_back(*t.fallback);
        } else {
          std::ostringstream os;
          os << "no table row for (";
          for (std::size_t i = 0; i < key.size(); ++i)
            os << (i ? ", " : "") << key[i];
          os << ") in " << t.description;
          throw EvaluationError(os.str());
        }
        break;
      }
      default: {
        Value b = pop();
        Value a = pop();
        Value r = 0;
        switch (in.op) {
          case Op::kAdd:
            if (__builtin_add_overflow(a, b, &r)) overflow();
            break;
          case Op::kSub:
            if (__builtin_sub_overflow(a, b, &r)) overflow();
            break;
          case Op::kMul:
            if (__builtin_mul_overflow(a, b, &r)) overflow();
            break;
          case Op::kEq: r = a == b; break;
          case Op::kNe: r = a != b; break;
          case Op::kLt: r = a < b; break;
          case Op::kLe: r = a <= b; break;
          case Op::kGt: r = a > b; break;
          case Op::kGe: r = a >= b; break;
          case Op::kAnd: r = (a != 0) && (b != 0); break;
          case Op::kOr: r = (a != 0) || (b != 0); break;
          default: break;
        }
        stack.push_back(r);
        break;
      }
    }
  }
  return stack.back();
}

}  // namespace cak
