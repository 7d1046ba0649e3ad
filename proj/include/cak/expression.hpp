#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cak {

using Value = std::int64_t;

// Immutable expression tree for structural equations and state maps.
//
// Grammar (lowest to highest precedence):
//   expr    := or
//   or      := and ('||' and)*
//   and     := cmp ('&&' cmp)*
//   cmp     := sum (('==' | '!=' | '<' | '<=' | '>' | '>=') sum)?
//   sum     := product (('+' | '-') product)*
//   product := unary ('*' unary)*
//   unary   := ('!' | '-') unary | primary
//   primary := INT | IDENT | '(' expr ')' | 'ite' '(' expr ',' expr ',' expr ')'
//            | 'table' '(' expr (',' expr)* ')' '[' row (',' row)* ']'
//   row     := tuple '->' INT | '_' '->' INT
//   tuple   := '(' INT (',' INT)* ')' | INT
//
// Table keys are usually plain variables but any expression is accepted.
// Booleans are the integers 0 and 1. `ite` evaluates only the taken branch.
class Expression {
 public:
  enum class Kind { kLiteral, kVariable, kUnary, kBinary, kIte, kTable };
  enum class UnaryOp { kNegate, kNot };
  enum class BinaryOp { kAdd, kSub, kMul, kEq, kNe, kLt, kLe, kGt, kGe, kAnd, kOr };

  struct Table {
    std::map<std::vector<Value>, Value> rows;
    std::optional<Value> fallback;
  };

  static Expression literal(Value v);
  static Expression variable(std::string name);
  static Expression unary(UnaryOp op, Expression operand);
  static Expression binary(BinaryOp op, Expression lhs, Expression rhs);
  static Expression ite(Expression cond, Expression then_branch,
                        Expression else_branch);
  static Expression table(std::vector<Expression> keys, Table t);

  // Throws InputError with the offending position on malformed text.
  static Expression parse(std::string_view text);

  Kind kind() const;
  Value literal_value() const;
  const std::string& variable_name() const;
  UnaryOp unary_op() const;
  BinaryOp binary_op() const;
  const Table& table_data() const;
  // Operands in order: unary 1, binary 2, ite 3, table one per key.
  std::span<const Expression> operands() const;

  // Canonical text; parse(to_string()) reproduces the same tree.
  std::string to_string() const;

  // Names of every variable the expression mentions, including table keys.
  std::set<std::string> variables() const;

  // Replaces variable references by expressions; names absent from the map
  // are kept.
  Expression substitute(
      const std::map<std::string, Expression>& replacements) const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

// An expression compiled against a slot layout for fast repeated evaluation.
// Variable names are resolved once; unresolved names make evaluation throw.
class CompiledExpression {
 public:
  using Resolver = std::function<std::optional<std::size_t>(const std::string&)>;

  CompiledExpression() = default;
  CompiledExpression(const Expression& expr, const Resolver& resolve);

  // `slots` holds the current value of every resolvable variable.
  Value evaluate(std::span<const Value> slots) const;

  // Names that the resolver could not place.
  const std::vector<std::string>& unresolved() const { return unresolved_; }

 private:
  enum class Op : std::uint8_t {
    kPush, kLoad, kUnresolved, kNeg, kNot, kAdd, kSub, kMul, kEq, kNe, kLt,
    kLe, kGt, kGe, kAnd, kOr, kJumpIfZero, kJump, kTable,
  };
  struct Instr {
    Op op;
    std::int64_t arg;
  };
  struct CompiledTable {
    std::size_t arity;
    std::map<std::vector<Value>, Value> rows;
    std::optional<Value> fallback;
    std::string description;
  };

  void emit(const Expression& expr, const Resolver& resolve);

  std::vector<Instr> code_;
  std::vector<CompiledTable> tables_;
  std::vector<std::string> unresolved_;
};

}  // namespace cak
