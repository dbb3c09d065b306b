#include "legnorm/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "legnorm/errors.hpp"

namespace legnorm {

SyntaxError::SyntaxError(std::size_t position,
                         std::vector<std::string> expected,
                         const std::string& found)
    : Error("SyntaxError",
            [&] {
              std::ostringstream os;
              os << "syntax error at position " << position
                 << ": expected ";
              for (std::size_t i = 0; i < expected.size(); ++i)
                os << (i ? ", " : "") << expected[i];
              os << " but found " << found;
              return os.str();
            }()),
      position_(position),
      expected_(std::move(expected)) {}

namespace {

struct FuncEntry {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncEntry, 5> kFunctions{{{"exp", Func::Exp},
                                               {"ln", Func::Ln},
                                               {"sin", Func::Sin},
                                               {"cos", Func::Cos},
                                               {"sqrt", Func::Sqrt}}};

std::optional<Func> lookup_function(std::string_view name) {
  for (const auto& e : kFunctions)
    if (e.name == name) return e.func;
  return std::nullopt;
}

}  // namespace

std::string_view func_name(Func f) noexcept {
  for (const auto& e : kFunctions)
    if (e.func == f) return e.name;
  return "?";
}

// ---------------------------------------------------------------------------
// Tree

struct Expression::Node {
  Kind kind;
  double value = 0.0;
  VarKind var_kind = VarKind::Fiber;
  std::size_t index = 0;
  Func func = Func::Exp;
  std::optional<Expression> a, b;
  bool fiber = false;
  std::size_t max_index = 0;
};

Expression Expression::number(double value) {
  if (!std::isfinite(value))
    throw std::invalid_argument("non-finite numeric literal");
  if (value < 0.0) return negate(number(-value));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->value = value;
  return Expression(std::move(n));
}

Expression Expression::variable(VarKind kind, std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Variable;
  n->var_kind = kind;
  n->index = index;
  n->fiber = kind == VarKind::Fiber;
  n->max_index = index;
  return Expression(std::move(n));
}

Expression Expression::negate(Expression operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Neg;
  n->fiber = operand.depends_on_fiber();
  n->max_index = operand.max_index();
  n->a = std::move(operand);
  return Expression(std::move(n));
}

Expression Expression::binary(Kind kind, Expression lhs, Expression rhs) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->fiber = lhs.depends_on_fiber() || rhs.depends_on_fiber();
  n->max_index = std::max(lhs.max_index(), rhs.max_index());
  n->a = std::move(lhs);
  n->b = std::move(rhs);
  return Expression(std::move(n));
}

Expression Expression::call(Func f, Expression arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Call;
  n->func = f;
  n->fiber = arg.depends_on_fiber();
  n->max_index = arg.max_index();
  n->a = std::move(arg);
  return Expression(std::move(n));
}

Expression::Kind Expression::kind() const noexcept { return node_->kind; }
double Expression::number_value() const { return node_->value; }
VarKind Expression::var_kind() const { return node_->var_kind; }
std::size_t Expression::var_index() const { return node_->index; }
Func Expression::func() const { return node_->func; }
const Expression& Expression::lhs() const { return *node_->a; }
const Expression& Expression::rhs() const { return *node_->b; }
bool Expression::depends_on_fiber() const noexcept { return node_->fiber; }
std::size_t Expression::max_index() const noexcept { return node_->max_index; }

bool Expression::is_number(double value) const noexcept {
  return node_->kind == Kind::Number && node_->value == value;
}

bool Expression::integer_literal(int& out) const noexcept {
  const Node* n = node_.get();
  int sign = 1;
  if (n->kind == Kind::Neg) {
    sign = -1;
    n = n->a->node_.get();
  }
  if (n->kind != Kind::Number) return false;
  const double v = n->value;
  if (v != std::floor(v) || v > std::numeric_limits<int>::max()) return false;
  out = sign * static_cast<int>(v);
  return true;
}

bool operator==(const Expression& a, const Expression& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case Expression::Kind::Number:
      return x.value == y.value;
    case Expression::Kind::Variable:
      return x.var_kind == y.var_kind && x.index == y.index;
    case Expression::Kind::Neg:
      return *x.a == *y.a;
    case Expression::Kind::Call:
      return x.func == y.func && *x.a == *y.a;
    default:
      return *x.a == *y.a && *x.b == *y.b;
  }
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength of each printed form; a child is parenthesized when it
// binds looser than its slot requires.
enum Level { kSum = 1, kProduct = 2, kFactor = 3, kPower = 4, kAtom = 5 };

int level_of(const Expression& e) {
  switch (e.kind()) {
    case Expression::Kind::Add:
    case Expression::Kind::Sub:
      return kSum;
    case Expression::Kind::Mul:
    case Expression::Kind::Div:
      return kProduct;
    case Expression::Kind::Neg:
      return kFactor;
    case Expression::Kind::Pow:
      return kPower;
    default:
      return kAtom;
  }
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

void print(const Expression& e, std::string& out);

void print_slot(const Expression& e, int min_level, std::string& out) {
  if (level_of(e) < min_level) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

void print(const Expression& e, std::string& out) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Number:
      out += format_number(e.number_value());
      return;
    case K::Variable:
      out += e.var_kind() == VarKind::Base ? 'x' : 'v';
      out += std::to_string(e.var_index());
      return;
    case K::Neg:
      out += '-';
      print_slot(e.lhs(), kPower, out);
      return;
    case K::Call:
      out += func_name(e.func());
      out += '(';
      print(e.lhs(), out);
      out += ')';
      return;
    case K::Add:
    case K::Sub:
      print_slot(e.lhs(), kSum, out);
      out += e.kind() == K::Add ? " + " : " - ";
      print_slot(e.rhs(), kProduct, out);
      return;
    case K::Mul:
    case K::Div:
      print_slot(e.lhs(), kProduct, out);
      out += e.kind() == K::Mul ? "*" : "/";
      print_slot(e.rhs(), kFactor, out);
      return;
    case K::Pow:
      print_slot(e.lhs(), kAtom, out);
      out += '^';
      print_slot(e.rhs(), kFactor, out);
      return;
  }
}

}  // namespace

std::string Expression::to_string() const {
  std::string out;
  print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum Type { Number, Ident, Op, End } type;
  std::string text;
  std::size_t pos;
  double value = 0.0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto digit = [&](std::size_t k) {
    return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]));
  };
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (digit(i)) {
      while (digit(i)) ++i;
      if (i < s.size() && s[i] == '.' && digit(i + 1)) {
        ++i;
        while (digit(i)) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t k = i + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (digit(k)) {
          i = k;
          while (digit(i)) ++i;
        }
      }
      Token t{Token::Number, std::string(s.substr(start, i - start)), start};
      auto [p, ec] = std::from_chars(s.data() + start, s.data() + i, t.value);
      if (ec != std::errc() || !std::isfinite(t.value))
        throw SyntaxError(start, {"finite number"}, "'" + t.text + "'");
      out.push_back(std::move(t));
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i])))
        ++i;
      out.push_back(
          {Token::Ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::string_view("+-*/^()").find(c) != std::string_view::npos) {
      out.push_back({Token::Op, std::string(1, c), start});
      ++i;
      continue;
    }
    throw SyntaxError(start, {"number", "identifier", "operator"},
                      "'" + std::string(1, c) + "'");
  }
  out.push_back({Token::End, "", s.size()});
  return out;
}

std::optional<Expression> variable_from_name(const std::string& name) {
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 'v'))
    return std::nullopt;
  std::size_t index = 0;
  const char* first = name.data() + 1;
  const char* last = name.data() + name.size();
  auto [p, ec] = std::from_chars(first, last, index);
  if (ec != std::errc() || p != last) return std::nullopt;
  return Expression::variable(name[0] == 'x' ? VarKind::Base : VarKind::Fiber,
                              index);
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  Expression parse() {
    Expression e = expr();
    if (peek().type != Token::End)
      fail({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool at_op(char c) const {
    return peek().type == Token::Op && peek().text[0] == c;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    throw SyntaxError(t.pos, std::move(expected),
                      t.type == Token::End ? "end of input"
                                           : "'" + t.text + "'");
  }

  Expression expr() {
    Expression e = term();
    while (at_op('+') || at_op('-')) {
      const auto k = at_op('+') ? Expression::Kind::Add : Expression::Kind::Sub;
      ++pos_;
      e = Expression::binary(k, std::move(e), term());
    }
    return e;
  }

  Expression term() {
    Expression e = factor();
    while (at_op('*') || at_op('/')) {
      const auto k = at_op('*') ? Expression::Kind::Mul : Expression::Kind::Div;
      ++pos_;
      e = Expression::binary(k, std::move(e), factor());
    }
    return e;
  }

  Expression factor() {
    if (at_op('-')) {
      ++pos_;
      return Expression::negate(power());
    }
    return power();
  }

  Expression power() {
    Expression base = atom();
    if (at_op('^')) {
      ++pos_;
      return Expression::binary(Expression::Kind::Pow, std::move(base),
                                factor());
    }
    return base;
  }

  Expression atom() {
    const Token& t = peek();
    if (t.type == Token::Number) {
      ++pos_;
      return Expression::number(t.value);
    }
    if (t.type == Token::Ident) {
      const std::string name = t.text;
      ++pos_;
      if (at_op('(')) {
        const auto f = lookup_function(name);
        if (!f) throw UnknownFunction(name);
        ++pos_;
        Expression arg = expr();
        if (!at_op(')')) fail({"')'"});
        ++pos_;
        return Expression::call(*f, std::move(arg));
      }
      if (lookup_function(name)) fail({"'('"});
      if (auto v = variable_from_name(name)) return *v;
      throw UnknownVariable(name);
    }
    if (at_op('(')) {
      ++pos_;
      Expression e = expr();
      if (!at_op(')')) fail({"')'"});
      ++pos_;
      return e;
    }
    fail({"number", "identifier", "'('", "'-'"});
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view src) {
  return Parser(src).parse();
}

// ---------------------------------------------------------------------------
// Symbolic fiber derivative

namespace {

using K = Expression::Kind;

bool is_zero(const Expression& e) { return e.is_number(0.0); }
bool is_one(const Expression& e) { return e.is_number(1.0); }

Expression num(double v) { return Expression::number(v); }

Expression neg(Expression a) {
  if (is_zero(a)) return a;
  if (a.kind() == K::Neg) return a.lhs();
  return Expression::negate(std::move(a));
}

Expression add(Expression a, Expression b) {
  if (is_zero(a)) return b;
  if (is_zero(b)) return a;
  return Expression::binary(K::Add, std::move(a), std::move(b));
}

Expression sub(Expression a, Expression b) {
  if (is_zero(b)) return a;
  if (is_zero(a)) return neg(std::move(b));
  return Expression::binary(K::Sub, std::move(a), std::move(b));
}

Expression mul(Expression a, Expression b) {
  if (is_zero(a) || is_zero(b)) return num(0.0);
  if (is_one(a)) return b;
  if (is_one(b)) return a;
  return Expression::binary(K::Mul, std::move(a), std::move(b));
}

Expression div(Expression a, Expression b) {
  if (is_zero(a)) return num(0.0);
  if (is_one(b)) return a;
  return Expression::binary(K::Div, std::move(a), std::move(b));
}

Expression ipow(Expression a, int k) {
  if (k == 0) return num(1.0);
  if (k == 1) return a;
  return Expression::binary(K::Pow, std::move(a), num(k));
}

Expression d(const Expression& e, std::size_t i) {
  if (!e.depends_on_fiber()) return num(0.0);
  switch (e.kind()) {
    case K::Number:
      return num(0.0);
    case K::Variable:
      return num(e.var_kind() == VarKind::Fiber && e.var_index() == i ? 1.0
                                                                      : 0.0);
    case K::Neg:
      return neg(d(e.lhs(), i));
    case K::Add:
      return add(d(e.lhs(), i), d(e.rhs(), i));
    case K::Sub:
      return sub(d(e.lhs(), i), d(e.rhs(), i));
    case K::Mul:
      return add(mul(d(e.lhs(), i), e.rhs()), mul(e.lhs(), d(e.rhs(), i)));
    case K::Div:
      return div(sub(mul(d(e.lhs(), i), e.rhs()), mul(e.lhs(), d(e.rhs(), i))),
                 ipow(e.rhs(), 2));
    case K::Pow: {
      const Expression& a = e.lhs();
      const Expression& b = e.rhs();
      int k = 0;
      if (b.integer_literal(k))
        return mul(mul(num(k), ipow(a, k - 1)), d(a, i));
      if (!b.depends_on_fiber())
        return mul(mul(b, Expression::binary(K::Pow, a, sub(b, num(1.0)))),
                   d(a, i));
      // a^b (b' ln a + b a'/a)
      return mul(e, add(mul(d(b, i), Expression::call(Func::Ln, a)),
                        div(mul(b, d(a, i)), a)));
    }
    case K::Call: {
      const Expression& a = e.lhs();
      const Expression da = d(a, i);
      switch (e.func()) {
        case Func::Exp:
          return mul(e, da);
        case Func::Ln:
          return div(da, a);
        case Func::Sin:
          return mul(Expression::call(Func::Cos, a), da);
        case Func::Cos:
          return neg(mul(Expression::call(Func::Sin, a), da));
        case Func::Sqrt:
          return div(da, mul(num(2.0), e));
      }
    }
  }
  return num(0.0);
}

}  // namespace

Expression differentiate(const Expression& e, std::size_t fiber_index) {
  return d(e, fiber_index);
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double value_of(double x) { return x; }
double value_of(const Jet2& j) { return j.value(); }

struct ScalarCarrier {
  using T = double;
  static T constant(double c) { return c; }
  static T variable(VarKind, std::size_t, double value) { return value; }
  static T int_power(const T& a, int k) {
    return std::pow(a, static_cast<double>(k));
  }
  static T real_power(const T& a, const T& b) {
    return std::exp(b * std::log(a));
  }
};

struct JetCarrier {
  using T = Jet2;
  std::size_t n;
  T constant(double c) const { return Jet2(c, n); }
  T variable(VarKind kind, std::size_t index, double value) const {
    return Jet2::seed(kind, index, value, n);
  }
  static T int_power(const T& a, int k) { return pow(a, k); }
  static T real_power(const T& a, const T& b) { return pow(a, b); }
};

template <class Carrier>
typename Carrier::T evaluate(const Expression& e, const ChartPoint& p,
                             const Carrier& c) {
  using T = typename Carrier::T;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  switch (e.kind()) {
    case K::Number:
      return c.constant(e.number_value());
    case K::Variable: {
      const std::size_t i = e.var_index();
      const double v =
          e.var_kind() == VarKind::Base ? p.x[i - 1] : p.v[i - 1];
      return c.variable(e.var_kind(), i, v);
    }
    case K::Neg:
      return -evaluate(e.lhs(), p, c);
    case K::Add:
      return evaluate(e.lhs(), p, c) + evaluate(e.rhs(), p, c);
    case K::Sub:
      return evaluate(e.lhs(), p, c) - evaluate(e.rhs(), p, c);
    case K::Mul:
      return evaluate(e.lhs(), p, c) * evaluate(e.rhs(), p, c);
    case K::Div: {
      T a = evaluate(e.lhs(), p, c);
      T b = evaluate(e.rhs(), p, c);
      if (value_of(b) == 0.0) throw DomainError("division by zero");
      return a / b;
    }
    case K::Pow: {
      T a = evaluate(e.lhs(), p, c);
      int k = 0;
      if (e.rhs().integer_literal(k)) {
        if (value_of(a) == 0.0 && k < 0)
          throw DomainError("division by zero in power");
        return Carrier::int_power(a, k);
      }
      T b = evaluate(e.rhs(), p, c);
      if (!(value_of(a) > 0.0))
        throw DomainError("non-integer power of non-positive base");
      return Carrier::real_power(a, b);
    }
    case K::Call: {
      T a = evaluate(e.lhs(), p, c);
      switch (e.func()) {
        case Func::Exp:
          return exp(a);
        case Func::Ln:
          if (!(value_of(a) > 0.0)) throw DomainError("ln of non-positive value");
          return log(a);
        case Func::Sin:
          return sin(a);
        case Func::Cos:
          return cos(a);
        case Func::Sqrt:
          if (value_of(a) < 0.0) throw DomainError("sqrt of negative value");
          return sqrt(a);
      }
    }
  }
  throw std::logic_error("unreachable expression kind");
}

void check_point(const ChartPoint& p, std::size_t n) {
  if (p.x.size() != n || p.v.size() != n)
    throw std::invalid_argument("chart point dimension mismatch");
}

void check_indices(const Expression& e, std::size_t n) {
  switch (e.kind()) {
    case K::Number:
      return;
    case K::Variable:
      if (e.var_index() < 1 || e.var_index() > n)
        throw UnknownVariable(e.to_string());
      return;
    case K::Neg:
    case K::Call:
      check_indices(e.lhs(), n);
      return;
    default:
      check_indices(e.lhs(), n);
      check_indices(e.rhs(), n);
  }
}

}  // namespace

BoundExpression bind(const Expression& e, std::size_t n) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2");
  check_indices(e, n);
  return BoundExpression(e, n);
}

double BoundExpression::eval_scalar(const ChartPoint& p) const {
  check_point(p, n_);
  return evaluate(expr_, p, ScalarCarrier{});
}

Jet2 BoundExpression::eval_jet(const ChartPoint& p) const {
  check_point(p, n_);
  return evaluate(expr_, p, JetCarrier{n_});
}

// ---------------------------------------------------------------------------
// Maps

std::string MapDefinition::to_text() const {
  std::ostringstream os;
  os << "dim = " << n << "\n";
  if (const auto* pp = std::get_if<PotentialPair>(&body)) {
    os << "phi = " << pp->phi.to_string() << "\n";
    os << "L = " << pp->potential.to_string() << "\n";
  } else {
    for (std::size_t i = 0; i < components.size(); ++i)
      os << "L" << (i + 1) << " = " << components[i].expression().to_string()
         << "\n";
  }
  return os.str();
}

MapDefinition make_explicit_map(std::size_t n,
                                std::vector<Expression> components) {
  if (components.size() != n)
    throw FormatError(0, "expected " + std::to_string(n) + " components");
  MapDefinition m;
  m.n = n;
  for (const auto& c : components) m.components.push_back(bind(c, n));
  m.body = ExplicitList{std::move(components)};
  m.source = m.to_text();
  return m;
}

}  // namespace legnorm
