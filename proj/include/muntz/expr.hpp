#pragma once

#include <cctype>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "muntz/muntz_series.hpp"
#include "muntz/numeric/special.hpp"

namespace muntz {

/// Coefficient expressions over the variable t:
///
///   expr   := term (('+' | '-') term)*
///   term   := factor ('*' factor)*
///   factor := '-' factor | primary ('^' power)*
///   power  := '(' rational ')' | unsigned-integer
///   primary:= number | 'i' | 't' | '(' expr ')'
///           | ('sin' | 'cos' | 'exp') '(' expr ')' | 'besselj' '(' integer ';' expr ')'
///
/// Non-integer powers apply only to powers of t, and atom arguments must be
/// monomials a*t^nu, so every expression has a Muntz expansion.
namespace expr {

enum class Kind { Number, Imag, Var, Neg, Add, Sub, Mul, Pow, Sin, Cos, Exp, Bessel };

struct Node;
using Expr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  std::string text;     // Number: literal as written
  Rational exponent;    // Pow
  long order = 0;       // Bessel
  Expr lhs;             // operand of unary nodes, atoms and Pow; left operand of binaries
  Expr rhs;
};

constexpr int kMaxDepth = 256;

inline Expr make(Kind k, Expr a = nullptr, Expr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}
inline Expr number(std::string text) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Number;
  n->text = std::move(text);
  return n;
}
inline Expr power(Expr base, Rational r) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Pow;
  n->lhs = std::move(base);
  n->exponent = r;
  return n;
}
inline Expr bessel(long c, Expr arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Bessel;
  n->order = c;
  n->lhs = std::move(arg);
  return n;
}

inline bool is_atom(Kind k) { return k == Kind::Sin || k == Kind::Cos || k == Kind::Exp || k == Kind::Bessel; }

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr run() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("operator or end of input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  int depth_ = 0;

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) throw ParseError(p.pos_, "shallower nesting (limit 256)", "deeper nesting");
    }
    ~DepthGuard() { --p.depth_; }
  };

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < src_.size() ? src_[pos_] : '\0';
  }
  std::string found() const {
    if (pos_ >= src_.size()) return "end of input";
    return std::string("'") + src_[pos_] + "'";
  }
  [[noreturn]] void fail(const std::string& expected) const { throw ParseError(pos_, expected, found()); }
  void expect(char c) {
    if (peek() != c) fail(std::string("'") + c + "'");
    ++pos_;
  }

  Expr parse_expr() {
    DepthGuard guard(*this);
    Expr e = parse_term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        e = make(Kind::Add, e, parse_term());
      } else if (c == '-') {
        ++pos_;
        e = make(Kind::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    while (peek() == '*') {
      ++pos_;
      e = make(Kind::Mul, e, parse_factor());
    }
    return e;
  }

  Expr parse_factor() {
    DepthGuard guard(*this);
    if (peek() == '-') {
      ++pos_;
      return make(Kind::Neg, parse_factor());
    }
    Expr e = parse_primary();
    while (peek() == '^') {
      ++pos_;
      e = power(e, parse_power());
    }
    return e;
  }

  std::int64_t parse_unsigned() {
    skip_ws();
    const std::size_t start = pos_;
    std::int64_t v = 0;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
      if (pos_ - start >= 18) throw ParseError(start, "integer of at most 18 digits", "longer integer");
      v = v * 10 + (src_[pos_] - '0');
      ++pos_;
    }
    if (pos_ == start) fail("integer");
    return v;
  }
  std::int64_t parse_signed() {
    if (peek() == '-') {
      ++pos_;
      return -parse_unsigned();
    }
    return parse_unsigned();
  }

  Rational parse_power() {
    if (peek() == '(') {
      ++pos_;
      const std::int64_t num = parse_signed();
      std::int64_t den = 1;
      if (peek() == '/') {
        ++pos_;
        const std::size_t at = pos_;
        den = parse_signed();
        if (den == 0) throw ParseError(at, "non-zero denominator", "0");
      }
      expect(')');
      return {num, den};
    }
    return {parse_unsigned()};
  }

  Expr parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string_view id = src_.substr(start, pos_ - start);
      if (id == "t") return make(Kind::Var);
      if (id == "i") return make(Kind::Imag);
      if (id == "sin" || id == "cos" || id == "exp") {
        expect('(');
        Expr arg = parse_expr();
        expect(')');
        return make(id == "sin" ? Kind::Sin : (id == "cos" ? Kind::Cos : Kind::Exp), arg);
      }
      if (id == "besselj") {
        expect('(');
        const long order = static_cast<long>(parse_unsigned());
        expect(';');
        Expr arg = parse_expr();
        expect(')');
        return bessel(order, arg);
      }
      throw ParseError(start, "'t', 'i', sin, cos, exp or besselj", "'" + std::string(id) + "'");
    }
    fail("number, 't', 'i', function or '('");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t n = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) throw ParseError(start, "digits", found());
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("exponent digits");
    }
    return number(std::string(src_.substr(start, pos_ - start)));
  }
};

inline std::string kind_name(Kind k) {
  switch (k) {
    case Kind::Sin: return "sin";
    case Kind::Cos: return "cos";
    case Kind::Exp: return "exp";
    case Kind::Bessel: return "besselj";
    default: return "expression";
  }
}

}  // namespace detail

/// True for t and (nested) rational powers of t.
inline bool is_t_power(const Expr& e) {
  if (e->kind == Kind::Var) return true;
  return e->kind == Kind::Pow && is_t_power(e->lhs);
}

/// Exponent nu if e is a monomial a*t^nu, otherwise nullopt.
inline std::optional<Rational> monomial_exponent(const Expr& e) {
  switch (e->kind) {
    case Kind::Number:
    case Kind::Imag: return Rational(0);
    case Kind::Var: return Rational(1);
    case Kind::Neg: return monomial_exponent(e->lhs);
    case Kind::Mul: {
      auto a = monomial_exponent(e->lhs);
      auto b = monomial_exponent(e->rhs);
      if (!a || !b) return std::nullopt;
      return *a + *b;
    }
    case Kind::Pow: {
      auto a = monomial_exponent(e->lhs);
      if (!a) return std::nullopt;
      return *a * e->exponent;
    }
    case Kind::Add:
    case Kind::Sub: {
      // a sum of constants is still a constant
      auto a = monomial_exponent(e->lhs);
      auto b = monomial_exponent(e->rhs);
      if (a && b && *a == Rational(0) && *b == Rational(0)) return Rational(0);
      return std::nullopt;
    }
    default: {
      auto a = monomial_exponent(e->lhs);
      if (a && *a == Rational(0)) return Rational(0);  // atom of a constant
      return std::nullopt;
    }
  }
}

/// Semantic rules: no negative exponents, non-integer powers only of t, monomial atom arguments.
inline void validate(const Expr& e) {
  switch (e->kind) {
    case Kind::Number:
    case Kind::Imag:
    case Kind::Var: return;
    case Kind::Pow:
      if (e->exponent < Rational(0)) throw ValidationError("negative exponent " + e->exponent.str());
      if (!e->exponent.is_integer() && !is_t_power(e->lhs)) {
        throw ValidationError("non-integer power " + e->exponent.str() + " applies only to powers of t");
      }
      validate(e->lhs);
      return;
    case Kind::Neg: validate(e->lhs); return;
    case Kind::Add:
    case Kind::Sub:
    case Kind::Mul:
      validate(e->lhs);
      validate(e->rhs);
      return;
    default:
      validate(e->lhs);
      if (!monomial_exponent(e->lhs)) {
        throw ValidationError("argument of " + detail::kind_name(e->kind) + " is not a monomial a*t^nu");
      }
      return;
  }
}

/// Parses and validates; ParseError on syntax, ValidationError on semantic rules.
inline Expr parse(std::string_view src) {
  Expr e = detail::Parser(src).run();
  validate(e);
  return e;
}

namespace detail {
inline int print_rank(Kind k) {
  switch (k) {
    case Kind::Add:
    case Kind::Sub: return 0;
    case Kind::Mul: return 1;
    case Kind::Neg: return 2;
    default: return 3;
  }
}
}  // namespace detail

/// Canonical text; parse(print(e)) is structurally identical to e.
inline std::string print(const Expr& e) {
  auto wrap = [](const Expr& x, bool paren) { return paren ? "(" + print(x) + ")" : print(x); };
  switch (e->kind) {
    case Kind::Number: return e->text;
    case Kind::Imag: return "i";
    case Kind::Var: return "t";
    case Kind::Neg: return "-" + wrap(e->lhs, detail::print_rank(e->lhs->kind) < 2);
    case Kind::Add: return print(e->lhs) + " + " + wrap(e->rhs, detail::print_rank(e->rhs->kind) == 0);
    case Kind::Sub: return print(e->lhs) + " - " + wrap(e->rhs, detail::print_rank(e->rhs->kind) == 0);
    case Kind::Mul:
      return wrap(e->lhs, detail::print_rank(e->lhs->kind) == 0) + "*" +
             wrap(e->rhs, detail::print_rank(e->rhs->kind) <= 1);
    case Kind::Pow: {
      const bool paren = detail::print_rank(e->lhs->kind) < 3 || e->lhs->kind == Kind::Number;
      return wrap(e->lhs, paren) + "^(" + e->exponent.str() + ")";
    }
    case Kind::Bessel: return "besselj(" + std::to_string(e->order) + "; " + print(e->lhs) + ")";
    default: return detail::kind_name(e->kind) + "(" + print(e->lhs) + ")";
  }
}

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->text != b->text || a->order != b->order) return false;
  if (a->kind == Kind::Pow && !(a->exponent == b->exponent)) return false;
  return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

/// Least common multiple of all exponent denominators (1 if there are none).
inline long grid_denominator(const Expr& e) {
  if (!e) return 1;
  long q = 1;
  if (e->kind == Kind::Pow) q = static_cast<long>(e->exponent.den());
  return lcm(lcm(q, grid_denominator(e->lhs)), grid_denominator(e->rhs));
}

inline bool depends_on_t(const Expr& e) {
  if (!e) return false;
  if (e->kind == Kind::Var) return true;
  return depends_on_t(e->lhs) || depends_on_t(e->rhs);
}

/// Pointwise value at t >= 0.
inline Complex eval(const Expr& e, const Real& t, Precision p) {
  switch (e->kind) {
    case Kind::Number: return Complex(Real::parse(e->text, p));
    case Kind::Imag: return Complex::i(p);
    case Kind::Var:
      if (t.sign() < 0) throw DomainError("expressions are evaluated at t >= 0");
      return Complex(t.rounded(p));
    case Kind::Neg: return -eval(e->lhs, t, p);
    case Kind::Add: return eval(e->lhs, t, p) + eval(e->rhs, t, p);
    case Kind::Sub: return eval(e->lhs, t, p) - eval(e->rhs, t, p);
    case Kind::Mul: return eval(e->lhs, t, p) * eval(e->rhs, t, p);
    case Kind::Pow: {
      const Complex b = eval(e->lhs, t, p);
      if (e->exponent.is_integer()) return pow(b, static_cast<long>(e->exponent.num()));
      // base is a power of t: real and non-negative
      return Complex(pow(abs(b.re()), e->exponent));
    }
    case Kind::Sin: return sin(eval(e->lhs, t, p));
    case Kind::Cos: return cos(eval(e->lhs, t, p));
    case Kind::Exp: return exp(eval(e->lhs, t, p));
    case Kind::Bessel: return bessel_j(e->order, eval(e->lhs, t, p));
  }
  throw DomainError("unknown expression node");
}

namespace detail {

inline MuntzSeries constant_series(const MuntzGrid& g, long m, Complex c) {
  MuntzSeries s(g, m, c.precision());
  s[0] = std::move(c);
  return s;
}

inline MuntzSeries series_pow(MuntzSeries base, long k, Precision p) {
  MuntzSeries result = constant_series(base.grid(), base.truncation(), Complex(1, p));
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

/// Taylor coefficient f_k of an atom's function at 0 (f(x) = sum f_k x^k), given 1/k!.
/// Returns false when the coefficient vanishes.
inline bool atom_coefficient(const Node& n, long k, Precision p, Real& out) {
  switch (n.kind) {
    case Kind::Exp: out = Real(1, p) / Real::factorial(static_cast<unsigned long>(k), p); return true;
    case Kind::Sin:
      if (k % 2 == 0) return false;
      out = Real(1, p) / Real::factorial(static_cast<unsigned long>(k), p);
      if ((k / 2) % 2 == 1) out = -out;
      return true;
    case Kind::Cos:
      if (k % 2 == 1) return false;
      out = Real(1, p) / Real::factorial(static_cast<unsigned long>(k), p);
      if ((k / 2) % 2 == 1) out = -out;
      return true;
    case Kind::Bessel: {
      // J_c(x) = sum_m (-1)^m (x/2)^{2m+c} / (m! (m+c)!)
      const long c = n.order;
      if (k < c || (k - c) % 2 == 1) return false;
      const long m = (k - c) / 2;
      out = Real::pow2(-k, p) / (Real::factorial(static_cast<unsigned long>(m), p) *
                                 Real::factorial(static_cast<unsigned long>(m + c), p));
      if (m % 2 == 1) out = -out;
      return true;
    }
    default: return false;
  }
}

}  // namespace detail

/// Muntz expansion sum_{mu=0}^{M} a_mu t^{mu/q}; every exponent must lie on the grid.
inline MuntzSeries expand(const Expr& e, const MuntzGrid& g, long m, Precision p) {
  if (m < 0) throw TruncationError("negative truncation order");
  switch (e->kind) {
    case Kind::Number:
    case Kind::Imag: return detail::constant_series(g, m, eval(e, Real(p), p));
    case Kind::Var:
    case Kind::Pow: {
      if (is_t_power(e)) {
        const long idx = g.index_of(*monomial_exponent(e));
        MuntzSeries s(g, m, p);
        if (idx <= m) s[idx] = Complex(1, p);
        return s;
      }
      return detail::series_pow(expand(e->lhs, g, m, p), static_cast<long>(e->exponent.num()), p);
    }
    case Kind::Neg: return expand(e->lhs, g, m, p) * Complex(-1, p);
    case Kind::Add: return expand(e->lhs, g, m, p) + expand(e->rhs, g, m, p);
    case Kind::Sub: return expand(e->lhs, g, m, p) - expand(e->rhs, g, m, p);
    case Kind::Mul: return expand(e->lhs, g, m, p) * expand(e->rhs, g, m, p);
    default: {
      const auto nu = monomial_exponent(e->lhs);
      if (!nu) throw ValidationError("argument of " + detail::kind_name(e->kind) + " is not a monomial a*t^nu");
      const long d = g.index_of(*nu);
      if (d == 0) return detail::constant_series(g, m, eval(e, Real(p), p));
      // coefficient a of the monomial argument a*t^nu is its value at t = 1
      const Complex a = eval(e->lhs, Real(1, p), p);
      MuntzSeries s(g, m, p);
      Complex ak(1, p);
      Real fk(p);
      for (long k = 0; k * d <= m; ++k) {
        if (detail::atom_coefficient(*e, k, p, fk)) s[k * d] = ak * fk;
        ak = ak * a;
      }
      return s;
    }
  }
}

}  // namespace expr
}  // namespace muntz
