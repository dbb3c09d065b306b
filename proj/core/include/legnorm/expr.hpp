#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "legnorm/jet.hpp"
#include "legnorm/linalg.hpp"

namespace legnorm {

/// A point of the tangent bundle in a chart: base coordinates x and fiber
/// (velocity) coordinates v, both of length n.
struct ChartPoint {
  Vec x;
  Vec v;
};

enum class Func { Exp, Ln, Sin, Cos, Sqrt };

std::string_view func_name(Func f) noexcept;

/// Immutable expression tree over x1..xn, v1..vn. Nodes are shared, so
/// copies are cheap.
///
/// Grammar (whitespace insignificant):
///   expr   := term (("+"|"-") term)*
///   term   := factor (("*"|"/") factor)*
///   factor := ("-")? power
///   power  := atom ("^" factor)?
///   atom   := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
class Expression {
 public:
  enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };

  /// Literal; negative values are represented as Neg(Number).
  static Expression number(double value);
  static Expression variable(VarKind kind, std::size_t index);
  static Expression negate(Expression operand);
  static Expression binary(Kind kind, Expression lhs, Expression rhs);
  static Expression call(Func f, Expression arg);

  Kind kind() const noexcept;
  double number_value() const;
  VarKind var_kind() const;
  std::size_t var_index() const;
  Func func() const;
  /// Operand of Neg/Call, or left operand of a binary node.
  const Expression& lhs() const;
  const Expression& rhs() const;

  bool is_number(double value) const noexcept;
  /// Set when the exponent is an integer literal (possibly negated).
  bool integer_literal(int& out) const noexcept;
  bool depends_on_fiber() const noexcept;
  /// Largest variable index referenced (0 if none).
  std::size_t max_index() const noexcept;

  /// Canonical text; parse(to_string()) reproduces the same tree.
  std::string to_string() const;

  friend bool operator==(const Expression& a, const Expression& b);

 private:
  struct Node;
  explicit Expression(std::shared_ptr<const Node> node)
      : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expression parse_expression(std::string_view src);

/// d/dv^index taken on the tree (x-variables are constants). Trivial
/// zero/one folding only, no simplification beyond that.
Expression differentiate(const Expression& e, std::size_t fiber_index);

/// Expression validated against a dimension; immutable and safe to share
/// between threads.
class BoundExpression {
 public:
  const Expression& expression() const noexcept { return expr_; }
  std::size_t dim() const noexcept { return n_; }

  double eval_scalar(const ChartPoint& p) const;
  Jet2 eval_jet(const ChartPoint& p) const;

 private:
  friend BoundExpression bind(const Expression& e, std::size_t n);
  BoundExpression(Expression e, std::size_t n) : expr_(std::move(e)), n_(n) {}
  Expression expr_;
  std::size_t n_;
};

/// Throws UnknownVariable when an index falls outside [1, n].
BoundExpression bind(const Expression& e, std::size_t n);

struct ExplicitList {
  std::vector<Expression> components;
};

struct PotentialPair {
  Expression phi;
  Expression potential;
};

/// A generalized Legendre map p_i = L_i(x, v). `body` records how the map
/// was written; `components` always holds the n bound L_i.
struct MapDefinition {
  std::size_t n = 0;
  std::variant<ExplicitList, PotentialPair> body;
  std::vector<BoundExpression> components;
  std::string source;  // text identity used for report hashes

  /// Canonical file-format text of the map.
  std::string to_text() const;
};

/// Binds n explicit components. Throws FormatError on a count mismatch.
MapDefinition make_explicit_map(std::size_t n,
                                std::vector<Expression> components);

}  // namespace legnorm
