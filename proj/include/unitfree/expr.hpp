#pragma once

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unitfree/chart.hpp"

namespace unitfree {

enum class Op { Constant, Var, Add, Sub, Mul, Div, Neg, IntPow, Sin, Cos, Exp, Ln, Sqrt };

/// Immutable closed-form scalar expression over named coordinates.
///
/// Expressions are not tied to a chart; a chart is supplied when they are
/// evaluated or checked. Copies share structure. The arithmetic operators and
/// the free functions below (`pow`, `sin`, ...) apply the same local rewrites
/// as `simplify` while building, so derived expressions stay small. The
/// `raw::` builders construct nodes verbatim (the parser uses those).
class Expr {
 public:
  /// The constant 0.
  Expr();
  Expr(double value);  // NOLINT(google-explicit-constructor): constants read naturally in formulas

  static Expr var(std::string name);

  Op op() const noexcept;
  /// Constant value; only meaningful for Op::Constant.
  double value() const noexcept;
  /// Coordinate name; only meaningful for Op::Var.
  const std::string& name() const noexcept;
  /// Exponent; only meaningful for Op::IntPow.
  int exponent() const noexcept;
  /// Operands: two for binary ops, one for Neg/IntPow and the functions, none for leaves.
  std::span<const Expr> args() const noexcept;

  bool is_constant() const noexcept { return op() == Op::Constant; }
  bool is_constant(double c) const noexcept { return is_constant() && value() == c; }

  friend bool operator==(const Expr& a, const Expr& b) noexcept;
  friend bool operator!=(const Expr& a, const Expr& b) noexcept { return !(a == b); }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  friend Expr make_node(Op, double, std::string, int, std::vector<Expr>);

  std::shared_ptr<const Node> node_;
};

namespace raw {
Expr constant(double c);
Expr var(std::string name);
Expr binary(Op op, Expr lhs, Expr rhs);
Expr unary(Op op, Expr arg);
Expr int_pow(Expr base, int exponent);
}  // namespace raw

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr sin(const Expr& e);
Expr cos(const Expr& e);
Expr exp(const Expr& e);
Expr ln(const Expr& e);
Expr sqrt(const Expr& e);

/// Parses the expression grammar: numbers, identifiers, + - * / ^, parentheses
/// and sin/cos/exp/ln/sqrt calls. `^` takes nonnegative integer literals only.
/// Throws SyntaxError (with byte offset) or UnknownFunction.
Expr parse(std::string_view text);

/// Printable form in the same grammar, with the minimal parentheses that keep
/// the tree shape under `parse`. Constants use `%.17g`.
std::string to_string(const Expr& e);

/// Exact symbolic partial derivative with respect to `var`.
Expr diff(const Expr& e, std::string_view var);

/// Constant folding plus the local identities x+0, x*1, x*0, x/1, x^0, x^1, -(-x).
Expr simplify(const Expr& e);

/// Simultaneous substitution of coordinates by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& replacements);

/// Renames coordinates; names absent from the map are kept.
Expr rename(const Expr& e, const std::map<std::string, std::string>& names);

std::set<std::string> free_vars(const Expr& e);

/// Throws ChartMismatch unless every variable of `e` is a coordinate of `chart`.
void require_chart(const Expr& e, const Chart& chart);

/// Evaluates at a point; throws EvalError on division by zero, ln of a
/// nonpositive number or sqrt of a negative number.
double eval(const Expr& e, const Point& x);

/// Expression flattened into a postfix program with variables resolved to
/// chart indices; use this in inner loops.
class CompiledExpr {
 public:
  CompiledExpr(const Expr& e, const Chart& chart);

  double operator()(std::span<const double> x) const;
  double operator()(const Point& x) const { return (*this)(x.values()); }
  /// Same program in long double; identity residuals use this so that
  /// cancellation between large terms does not masquerade as a failure.
  long double extended(std::span<const double> x) const;
  long double extended(const Point& x) const { return extended(x.values()); }

 private:
  struct Instr {
    Op op;
    double value;
    int index;  // coordinate index for Var, exponent for IntPow
  };
  std::vector<Instr> code_;
  std::size_t stack_depth_ = 0;
};

}  // namespace unitfree
