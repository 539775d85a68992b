#include "unitfree/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

#include "unitfree/error.hpp"

namespace unitfree {

struct Expr::Node {
  Op op;
  double value = 0.0;
  std::string name;
  int exponent = 0;
  std::vector<Expr> args;
};

Expr make_node(Op op, double value, std::string name, int exponent, std::vector<Expr> args) {
  return Expr(std::make_shared<const Expr::Node>(Expr::Node{op, value, std::move(name), exponent, std::move(args)}));
}

namespace {

const Expr& zero_constant() {
  static const Expr zero = raw::constant(0.0);
  return zero;
}

bool is_binary(Op op) { return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div; }

bool is_function(Op op) {
  return op == Op::Sin || op == Op::Cos || op == Op::Exp || op == Op::Ln || op == Op::Sqrt;
}

const char* function_name(Op op) {
  switch (op) {
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Ln: return "ln";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

std::optional<Op> function_op(std::string_view name) {
  if (name == "sin") return Op::Sin;
  if (name == "cos") return Op::Cos;
  if (name == "exp") return Op::Exp;
  if (name == "ln") return Op::Ln;
  if (name == "sqrt") return Op::Sqrt;
  return std::nullopt;
}

template <class T>
T checked_div(T a, T b) {
  if (b == T(0)) throw EvalError("division by zero");
  return a / b;
}

template <class T>
T checked_ln(T a) {
  if (!(a > T(0))) throw EvalError("ln of nonpositive value");
  return std::log(a);
}

template <class T>
T checked_sqrt(T a) {
  if (a < T(0)) throw EvalError("sqrt of negative value");
  return std::sqrt(a);
}

template <class T>
T int_power(T base, int n) {
  T result = 1;
  T b = base;
  for (unsigned k = static_cast<unsigned>(n); k; k >>= 1) {
    if (k & 1u) result *= b;
    b *= b;
  }
  return result;
}

template <class T>
T apply_function(Op op, T a) {
  switch (op) {
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Exp: return std::exp(a);
    case Op::Ln: return checked_ln(a);
    case Op::Sqrt: return checked_sqrt(a);
    case Op::Neg: return -a;
    default: throw std::logic_error("not a unary function");
  }
}

template <class T>
T apply_binary(Op op, T a, T b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return checked_div(a, b);
    default: throw std::logic_error("not a binary operator");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : Expr(zero_constant()) {}

Expr::Expr(double value) : Expr(raw::constant(value)) {}

Expr Expr::var(std::string name) { return raw::var(std::move(name)); }

Op Expr::op() const noexcept { return node_->op; }
double Expr::value() const noexcept { return node_->value; }
const std::string& Expr::name() const noexcept { return node_->name; }
int Expr::exponent() const noexcept { return node_->exponent; }
std::span<const Expr> Expr::args() const noexcept { return node_->args; }

bool operator==(const Expr& a, const Expr& b) noexcept {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op()) return false;
  switch (a.op()) {
    case Op::Constant: return a.value() == b.value();
    case Op::Var: return a.name() == b.name();
    case Op::IntPow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default: break;
  }
  auto xa = a.args();
  auto xb = b.args();
  for (std::size_t i = 0; i < xa.size(); ++i) {
    if (!(xa[i] == xb[i])) return false;
  }
  return true;
}

namespace raw {

Expr constant(double c) { return make_node(Op::Constant, c, {}, 0, {}); }

Expr var(std::string name) { return make_node(Op::Var, 0.0, std::move(name), 0, {}); }

Expr binary(Op op, Expr lhs, Expr rhs) {
  if (!is_binary(op)) throw std::logic_error("raw::binary needs a binary operator");
  return make_node(op, 0.0, {}, 0, {std::move(lhs), std::move(rhs)});
}

Expr unary(Op op, Expr arg) {
  if (!(op == Op::Neg || is_function(op))) throw std::logic_error("raw::unary needs Neg or a function");
  return make_node(op, 0.0, {}, 0, {std::move(arg)});
}

Expr int_pow(Expr base, int exponent) {
  if (exponent < 0) throw std::logic_error("negative exponent");
  return make_node(Op::IntPow, 0.0, {}, exponent, {std::move(base)});
}

}  // namespace raw

// ---------------------------------------------------------------------------
// Building with local rewrites

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return a.value() + b.value();
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  if (b.is_constant() && b.value() < 0.0) return a - Expr(-b.value());
  if (b.op() == Op::Neg) return a - b.args()[0];
  if (a.op() == Op::Neg && a.args()[0] == b) return 0.0;
  if (b.op() == Op::Neg && b.args()[0] == a) return 0.0;
  return raw::binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return a.value() - b.value();
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  if (a == b) return 0.0;
  if (b.is_constant() && b.value() < 0.0) return a + Expr(-b.value());
  if (b.op() == Op::Neg) return a + b.args()[0];
  return raw::binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return a.value() * b.value();
  if (a.is_constant(0.0) || b.is_constant(0.0)) return 0.0;
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(-1.0)) return -b;
  if (b.is_constant(-1.0)) return -a;
  return raw::binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0) return a.value() / b.value();
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return 0.0;
  return raw::binary(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return -a.value();
  if (a.op() == Op::Neg) return a.args()[0];
  return raw::unary(Op::Neg, a);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("exponent must be nonnegative");
  if (exponent == 0) return 1.0;
  if (exponent == 1) return base;
  if (base.is_constant()) return int_power(base.value(), exponent);
  return raw::int_pow(base, exponent);
}

namespace {

Expr fold_function(Op op, const Expr& e) {
  if (e.is_constant()) {
    double v = e.value();
    bool in_domain = (op != Op::Ln || v > 0.0) && (op != Op::Sqrt || v >= 0.0);
    if (in_domain) return apply_function(op, v);
  }
  return raw::unary(op, e);
}

}  // namespace

Expr sin(const Expr& e) { return fold_function(Op::Sin, e); }
Expr cos(const Expr& e) { return fold_function(Op::Cos, e); }
Expr exp(const Expr& e) { return fold_function(Op::Exp, e); }
Expr ln(const Expr& e) { return fold_function(Op::Ln, e); }
Expr sqrt(const Expr& e) { return fold_function(Op::Sqrt, e); }

namespace {

Expr rebuild(Op op, const Expr& e, std::span<const Expr> args) {
  switch (op) {
    case Op::Constant:
    case Op::Var: return e;
    case Op::Add: return args[0] + args[1];
    case Op::Sub: return args[0] - args[1];
    case Op::Mul: return args[0] * args[1];
    case Op::Div: return args[0] / args[1];
    case Op::Neg: return -args[0];
    case Op::IntPow: return pow(args[0], e.exponent());
    default: return fold_function(op, args[0]);
  }
}

template <class LeafFn>
Expr transform(const Expr& e, const LeafFn& leaf) {
  if (e.op() == Op::Constant || e.op() == Op::Var) return leaf(e);
  std::vector<Expr> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(transform(a, leaf));
  return rebuild(e.op(), e, args);
}

}  // namespace

Expr simplify(const Expr& e) {
  return transform(e, [](const Expr& leaf) { return leaf; });
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements) {
  return transform(e, [&](const Expr& leaf) {
    if (leaf.op() == Op::Var) {
      auto it = replacements.find(leaf.name());
      if (it != replacements.end()) return it->second;
    }
    return leaf;
  });
}

Expr rename(const Expr& e, const std::map<std::string, std::string>& names) {
  switch (e.op()) {
    case Op::Constant: return e;
    case Op::Var: {
      auto it = names.find(e.name());
      return it == names.end() ? e : raw::var(it->second);
    }
    case Op::IntPow: return raw::int_pow(rename(e.args()[0], names), e.exponent());
    default:
      if (is_binary(e.op())) return raw::binary(e.op(), rename(e.args()[0], names), rename(e.args()[1], names));
      return raw::unary(e.op(), rename(e.args()[0], names));
  }
}

std::set<std::string> free_vars(const Expr& e) {
  std::set<std::string> out;
  std::function<void(const Expr&)> walk = [&](const Expr& x) {
    if (x.op() == Op::Var) out.insert(x.name());
    for (const auto& a : x.args()) walk(a);
  };
  walk(e);
  return out;
}

void require_chart(const Expr& e, const Chart& chart) {
  for (const auto& v : free_vars(e)) {
    if (!chart.contains(v)) {
      throw ChartMismatch("expression '" + to_string(e) + "' uses '" + v + "' which is not a coordinate of chart '" +
                          chart.name() + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

bool depends_on(const Expr& e, std::string_view var) {
  if (e.op() == Op::Var) return e.name() == var;
  for (const auto& a : e.args()) {
    if (depends_on(a, var)) return true;
  }
  return false;
}

}  // namespace

Expr diff(const Expr& e, std::string_view var) {
  if (!depends_on(e, var)) return 0.0;
  auto args = e.args();
  switch (e.op()) {
    case Op::Constant: return 0.0;
    case Op::Var: return 1.0;
    case Op::Add: return diff(args[0], var) + diff(args[1], var);
    case Op::Sub: return diff(args[0], var) - diff(args[1], var);
    case Op::Mul: return diff(args[0], var) * args[1] + args[0] * diff(args[1], var);
    case Op::Div: {
      Expr du = diff(args[0], var);
      Expr dv = diff(args[1], var);
      if (dv.is_constant(0.0)) return du / args[1];
      return (du * args[1] - args[0] * dv) / pow(args[1], 2);
    }
    case Op::Neg: return -diff(args[0], var);
    case Op::IntPow: {
      int n = e.exponent();
      return Expr(static_cast<double>(n)) * pow(args[0], n - 1) * diff(args[0], var);
    }
    case Op::Sin: return cos(args[0]) * diff(args[0], var);
    case Op::Cos: return -sin(args[0]) * diff(args[0], var);
    case Op::Exp: return e * diff(args[0], var);
    case Op::Ln: return diff(args[0], var) / args[0];
    case Op::Sqrt: return diff(args[0], var) / (Expr(2.0) * e);
  }
  throw std::logic_error("unhandled node in diff");
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_node(const Expr& e, const Point& x) {
  auto args = e.args();
  switch (e.op()) {
    case Op::Constant: return e.value();
    case Op::Var: return x[e.name()];
    case Op::IntPow: return int_power(eval_node(args[0], x), e.exponent());
    default:
      if (is_binary(e.op())) return apply_binary(e.op(), eval_node(args[0], x), eval_node(args[1], x));
      return apply_function(e.op(), eval_node(args[0], x));
  }
}

}  // namespace

double eval(const Expr& e, const Point& x) { return eval_node(e, x); }

CompiledExpr::CompiledExpr(const Expr& e, const Chart& chart) {
  std::size_t depth = 0;
  std::function<void(const Expr&)> emit = [&](const Expr& x) {
    for (const auto& a : x.args()) emit(a);
    Instr in{x.op(), 0.0, 0};
    switch (x.op()) {
      case Op::Constant:
        in.value = x.value();
        ++depth;
        break;
      case Op::Var: {
        auto idx = chart.index_of(x.name());
        if (!idx) throw ChartMismatch("'" + x.name() + "' is not a coordinate of chart '" + chart.name() + "'");
        in.index = static_cast<int>(*idx);
        ++depth;
        break;
      }
      case Op::IntPow: in.index = x.exponent(); break;
      default:
        if (is_binary(x.op())) --depth;
        break;
    }
    stack_depth_ = std::max(stack_depth_, depth);
    code_.push_back(in);
  };
  emit(e);
}

namespace {

template <class T, class Instr>
T run_program(const std::vector<Instr>& code, std::size_t depth, std::span<const double> x) {
  std::array<T, 64> small{};
  std::vector<T> large;
  T* stack = small.data();
  if (depth > small.size()) {
    large.resize(depth);
    stack = large.data();
  }
  std::size_t top = 0;
  for (const auto& in : code) {
    switch (in.op) {
      case Op::Constant: stack[top++] = in.value; break;
      case Op::Var: stack[top++] = x[static_cast<std::size_t>(in.index)]; break;
      case Op::IntPow: stack[top - 1] = int_power(stack[top - 1], in.index); break;
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div:
        --top;
        stack[top - 1] = apply_binary(in.op, stack[top - 1], stack[top]);
        break;
      default: stack[top - 1] = apply_function(in.op, stack[top - 1]); break;
    }
  }
  return stack[0];
}

}  // namespace

double CompiledExpr::operator()(std::span<const double> x) const { return run_program<double>(code_, stack_depth_, x); }

long double CompiledExpr::extended(std::span<const double> x) const {
  return run_program<long double>(code_, stack_depth_, x);
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw SyntaxError(message, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = raw::binary(Op::Add, lhs, parse_product());
      } else if (accept('-')) {
        lhs = raw::binary(Op::Sub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = raw::binary(Op::Mul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = raw::binary(Op::Div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  Expr parse_unary() {
    if (accept('-')) return raw::unary(Op::Neg, parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    while (accept('^')) {
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (pos_ == start) fail("exponent must be a nonnegative integer literal");
      if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
        fail("exponent must be a nonnegative integer literal");
      }
      int n = 0;
      auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, n);
      if (ec != std::errc{}) {
        pos_ = start;
        fail("exponent out of range");
      }
      base = raw::int_pow(base, n);
    }
    return base;
  }

  Expr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("expected expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t n = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) fail("malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent in number");
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc{} || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return raw::constant(value);
  }

  Expr parse_identifier() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    skip_space();
    bool call = pos_ < text_.size() && text_[pos_] == '(';
    auto fn = function_op(name);
    if (call) {
      if (!fn) throw UnknownFunction(name, start);
      ++pos_;
      Expr arg = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return raw::unary(*fn, arg);
    }
    if (fn) fail("expected '(' after function name '" + name + "'");
    return raw::var(std::move(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr int kSum = 1;
constexpr int kProduct = 2;
constexpr int kUnary = 3;
constexpr int kPower = 4;
constexpr int kAtom = 5;

int precedence(const Expr& e) {
  switch (e.op()) {
    case Op::Add:
    case Op::Sub: return kSum;
    case Op::Mul:
    case Op::Div: return kProduct;
    case Op::Neg: return kUnary;
    case Op::IntPow: return kPower;
    case Op::Constant: return std::signbit(e.value()) ? kUnary : kAtom;
    default: return kAtom;
  }
}

void print(const Expr& e, std::string& out) {
  auto wrap = [&](const Expr& child, bool parens) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
  };
  auto args = e.args();
  switch (e.op()) {
    case Op::Constant: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value());
      out += buf;
      return;
    }
    case Op::Var: out += e.name(); return;
    case Op::Neg:
      out += '-';
      wrap(args[0], precedence(args[0]) < kUnary);
      return;
    case Op::IntPow:
      wrap(args[0], precedence(args[0]) < kPower);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      int level = precedence(e);
      wrap(args[0], precedence(args[0]) < level);
      out += e.op() == Op::Add ? " + " : e.op() == Op::Sub ? " - " : e.op() == Op::Mul ? "*" : "/";
      wrap(args[1], precedence(args[1]) <= level);
      return;
    }
    default:
      out += function_name(e.op());
      out += '(';
      print(args[0], out);
      out += ')';
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

}  // namespace unitfree
