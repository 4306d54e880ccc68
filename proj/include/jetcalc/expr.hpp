#pragma once

// Scalar symbolic expressions in expanded rational normal form.
//
// An Expr is a quotient num/den of sparse multivariate polynomials with exact
// rational coefficients. Polynomial variables ("atoms") are coordinate symbols
// and opaque function applications sin/cos/exp/log/sqrt keyed by their
// normalized argument. Atoms are interned, so atom equality is pointer
// equality; atom order is the order of their canonical keys.
//
// Equality is semantic on the atom set: a == b iff a.num*b.den - b.num*a.den
// expands to the zero polynomial.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "jetcalc/error.hpp"
#include "jetcalc/rational.hpp"
#include "jetcalc/syntax.hpp"

namespace jetcalc {

enum class Fn { Sin, Cos, Exp, Log, Sqrt };

inline const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Sin:
      return "sin";
    case Fn::Cos:
      return "cos";
    case Fn::Exp:
      return "exp";
    case Fn::Log:
      return "log";
    case Fn::Sqrt:
      return "sqrt";
  }
  return "?";
}

inline Fn fn_from_name(std::string_view name) {
  if (name == "sin") return Fn::Sin;
  if (name == "cos") return Fn::Cos;
  if (name == "exp") return Fn::Exp;
  if (name == "log") return Fn::Log;
  if (name == "sqrt") return Fn::Sqrt;
  throw Error("unknown function '" + std::string(name) + "'");
}

struct AtomNode;

namespace poly {

struct Factor {
  const AtomNode* atom;
  int exp;
  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Sorted by ascending atom key; every exponent positive.
using Monomial = std::vector<Factor>;

struct Term {
  Monomial mono;
  Rational coef;
};

/// Terms sorted by descending graded-lex order, no zero coefficients.
using Poly = std::vector<Term>;

bool atom_less(const AtomNode* a, const AtomNode* b);
int mono_compare(const Monomial& a, const Monomial& b);

}  // namespace poly

using Bindings = std::map<std::string, double>;
using ExactBindings = std::map<std::string, Rational>;

class Expr {
 public:
  Expr();
  Expr(int v);  // NOLINT: integer literals are expressions
  Expr(long v);
  Expr(const Rational& v);

  static Expr symbol(const std::string& name);
  static Expr apply(Fn f, const Expr& arg);
  /// Builds num/den and normalizes. Throws DomainError if den is zero.
  static Expr from_polys(poly::Poly num, poly::Poly den);

  const poly::Poly& num() const { return rep_->num; }
  const poly::Poly& den() const { return rep_->den; }

  bool is_zero() const { return rep_->num.empty(); }
  bool is_polynomial() const;
  /// True when the expression contains no function atoms.
  bool is_rational_function() const;
  std::optional<Rational> constant() const;
  std::set<std::string> free_symbols() const;
  bool depends_on(const std::string& name) const;

  Expr diff(const std::string& name) const;
  Expr subst(const std::map<std::string, Expr>& map) const;
  double eval(const Bindings& b) const;
  Rational eval_exact(const ExactBindings& b) const;

  std::string str() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  /// Total structural order, used to key function atoms.
  static int structural_compare(const Expr& a, const Expr& b);

 private:
  struct Rep {
    poly::Poly num;
    poly::Poly den;
  };
  explicit Expr(std::shared_ptr<const Rep> r) : rep_(std::move(r)) {}
  std::shared_ptr<const Rep> rep_;
};

Expr pow(const Expr& base, long exponent);
Expr pow(const Expr& base, const Expr& exponent);
inline Expr sin(const Expr& e) { return Expr::apply(Fn::Sin, e); }
inline Expr cos(const Expr& e) { return Expr::apply(Fn::Cos, e); }
inline Expr exp(const Expr& e) { return Expr::apply(Fn::Exp, e); }
inline Expr log(const Expr& e) { return Expr::apply(Fn::Log, e); }
inline Expr sqrt(const Expr& e) { return Expr::apply(Fn::Sqrt, e); }

struct AtomNode {
  std::string key;   // canonical ordering key
  bool is_symbol = true;
  std::string name;  // symbol name
  Fn fn = Fn::Sin;
  Expr arg;
  std::set<std::string> free;
};

namespace poly {

inline bool atom_less(const AtomNode* a, const AtomNode* b) {
  return a != b && a->key < b->key;
}

inline int degree(const Monomial& m) {
  int d = 0;
  for (const auto& f : m) d += f.exp;
  return d;
}

/// Graded lex with atoms prioritized by ascending key. Returns >0 when a is the
/// greater monomial. Compatible with multiplication.
inline int mono_compare(const Monomial& a, const Monomial& b) {
  const int da = degree(a), db = degree(b);
  if (da != db) return da > db ? 1 : -1;
  std::size_t i = 0;
  for (; i < a.size() && i < b.size(); ++i) {
    if (a[i].atom != b[i].atom) return atom_less(a[i].atom, b[i].atom) ? 1 : -1;
    if (a[i].exp != b[i].exp) return a[i].exp > b[i].exp ? 1 : -1;
  }
  if (i < a.size()) return 1;
  if (i < b.size()) return -1;
  return 0;
}

struct MonoGreater {
  bool operator()(const Monomial& a, const Monomial& b) const { return mono_compare(a, b) > 0; }
};

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].atom == b[j].atom) {
      r.push_back({a[i].atom, a[i].exp + b[j].exp});
      ++i;
      ++j;
    } else if (atom_less(a[i].atom, b[j].atom)) {
      r.push_back(a[i++]);
    } else {
      r.push_back(b[j++]);
    }
  }
  for (; i < a.size(); ++i) r.push_back(a[i]);
  for (; j < b.size(); ++j) r.push_back(b[j]);
  return r;
}

/// a / b when b divides a.
inline std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
  Monomial r;
  std::size_t i = 0;
  for (const auto& f : b) {
    while (i < a.size() && a[i].atom != f.atom) {
      if (!atom_less(a[i].atom, f.atom)) return std::nullopt;
      r.push_back(a[i++]);
    }
    if (i == a.size() || a[i].exp < f.exp) return std::nullopt;
    if (a[i].exp > f.exp) r.push_back({f.atom, a[i].exp - f.exp});
    ++i;
  }
  for (; i < a.size(); ++i) r.push_back(a[i]);
  return r;
}

inline Poly constant(const Rational& c) {
  if (c == 0) return {};
  return {Term{{}, c}};
}

inline bool is_one(const Poly& p) { return p.size() == 1 && p[0].mono.empty() && p[0].coef == 1; }

inline std::optional<Rational> as_constant(const Poly& p) {
  if (p.empty()) return Rational(0);
  if (p.size() == 1 && p[0].mono.empty()) return p[0].coef;
  return std::nullopt;
}

inline bool equal(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].coef != b[i].coef || a[i].mono != b[i].mono) return false;
  return true;
}

inline Poly add(const Poly& a, const Poly& b, bool subtract = false) {
  Poly r;
  r.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    int c;
    if (i == a.size())
      c = -1;
    else if (j == b.size())
      c = 1;
    else
      c = mono_compare(a[i].mono, b[j].mono);
    if (c > 0) {
      r.push_back(a[i++]);
    } else if (c < 0) {
      r.push_back(subtract ? Term{b[j].mono, -b[j].coef} : b[j]);
      ++j;
    } else {
      Rational s = subtract ? Rational(a[i].coef - b[j].coef) : Rational(a[i].coef + b[j].coef);
      if (s != 0) r.push_back(Term{a[i].mono, s});
      ++i;
      ++j;
    }
  }
  return r;
}

inline Poly scale(const Poly& a, const Rational& c) {
  if (c == 0) return {};
  Poly r = a;
  for (auto& t : r) t.coef *= c;
  return r;
}

inline Poly mul_term(const Poly& a, const Term& t) {
  Poly r;
  r.reserve(a.size());
  for (const auto& s : a) r.push_back(Term{mono_mul(s.mono, t.mono), s.coef * t.coef});
  return r;
}

inline Poly mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  if (a.size() == 1) return mul_term(b, a[0]);
  if (b.size() == 1) return mul_term(a, b[0]);
  std::map<Monomial, Rational, MonoGreater> acc;
  for (const auto& s : a) {
    for (const auto& t : b) {
      auto m = mono_mul(s.mono, t.mono);
      auto it = acc.find(m);
      if (it == acc.end())
        acc.emplace(std::move(m), s.coef * t.coef);
      else
        it->second += s.coef * t.coef;
    }
  }
  Poly r;
  r.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) r.push_back(Term{m, c});
  return r;
}

inline Poly power(const Poly& a, long e) {
  Poly result = constant(1);
  Poly base = a;
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e) base = mul(base, base);
  }
  return result;
}

/// Exact quotient a / b, or nullopt when b does not divide a.
inline std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.empty()) throw DomainError("division by zero polynomial");
  Poly q;
  Poly r = a;
  const Term& lead = b.front();
  while (!r.empty()) {
    auto m = mono_div(r.front().mono, lead.mono);
    if (!m) return std::nullopt;
    Term t{std::move(*m), r.front().coef / lead.coef};
    r = add(r, mul_term(b, t), true);
    q = add(q, Poly{t});
  }
  return q;
}

/// Largest monomial dividing every term of both polynomials.
inline Monomial common_monomial(const Poly& a, const Poly& b) {
  const Poly* first = !a.empty() ? &a : &b;
  if (first->empty()) return {};
  Monomial g = first->front().mono;
  auto narrow = [&g](const Monomial& m) {
    Monomial r;
    std::size_t j = 0;
    for (const auto& f : g) {
      while (j < m.size() && atom_less(m[j].atom, f.atom)) ++j;
      if (j < m.size() && m[j].atom == f.atom) r.push_back({f.atom, std::min(f.exp, m[j].exp)});
    }
    g = std::move(r);
  };
  for (const auto* p : {&a, &b})
    for (const auto& t : *p) {
      if (g.empty()) return g;
      narrow(t.mono);
    }
  return g;
}

inline Poly divide_monomial(const Poly& a, const Monomial& m) {
  Poly r;
  r.reserve(a.size());
  for (const auto& t : a) r.push_back(Term{*mono_div(t.mono, m), t.coef});
  return r;
}

/// Partial derivative treating `atom` as an independent variable.
inline Poly partial(const Poly& p, const AtomNode* atom) {
  std::map<Monomial, Rational, MonoGreater> acc;
  for (const auto& t : p) {
    for (std::size_t k = 0; k < t.mono.size(); ++k) {
      if (t.mono[k].atom != atom) continue;
      Monomial m = t.mono;
      const int e = m[k].exp;
      if (e == 1)
        m.erase(m.begin() + static_cast<std::ptrdiff_t>(k));
      else
        m[k].exp = e - 1;
      acc[std::move(m)] += t.coef * e;
    }
  }
  Poly r;
  for (auto& [m, c] : acc)
    if (c != 0) r.push_back(Term{m, c});
  return r;
}

struct AtomKeyLess {
  bool operator()(const AtomNode* a, const AtomNode* b) const { return atom_less(a, b); }
};

/// Atoms of `p` in key order.
inline std::set<const AtomNode*, AtomKeyLess> atoms(const Poly& p) {
  std::set<const AtomNode*, AtomKeyLess> out;
  for (const auto& t : p)
    for (const auto& f : t.mono) out.insert(f.atom);
  return out;
}

inline int compare(const Poly& a, const Poly& b) {
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
    if (int c = mono_compare(a[i].mono, b[i].mono)) return c;
    if (a[i].coef != b[i].coef) return a[i].coef < b[i].coef ? -1 : 1;
  }
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  return 0;
}

}  // namespace poly

namespace detail {

inline std::string render_poly(const poly::Poly& p);

inline std::string render_factor(const poly::Factor& f) {
  std::string s = f.atom->is_symbol ? f.atom->name
                                    : std::string(fn_name(f.atom->fn)) + "(" + f.atom->arg.str() + ")";
  if (f.exp != 1) s += "^" + std::to_string(f.exp);
  return s;
}

inline std::string render_term(const Rational& c, const poly::Monomial& m) {
  std::string mono;
  for (const auto& f : m) {
    if (!mono.empty()) mono += "*";
    mono += render_factor(f);
  }
  if (mono.empty()) return to_string(c);
  if (c == 1) return mono;
  if (c == -1) return "-" + mono;
  return to_string(c) + "*" + mono;
}

inline std::string render_poly(const poly::Poly& p) {
  if (p.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& t = p[i];
    if (i == 0) {
      out += render_term(t.coef, t.mono);
    } else if (t.coef < 0) {
      out += " - " + render_term(-t.coef, t.mono);
    } else {
      out += " + " + render_term(t.coef, t.mono);
    }
  }
  return out;
}

class AtomTable {
 public:
  static AtomTable& instance() {
    static AtomTable table;
    return table;
  }

  const AtomNode* symbol(const std::string& name) {
    std::string key = "0" + name;
    std::lock_guard lock(mutex_);
    auto it = atoms_.find(key);
    if (it != atoms_.end()) return it->second.get();
    auto node = std::make_unique<AtomNode>();
    node->key = key;
    node->is_symbol = true;
    node->name = name;
    node->free = {name};
    const AtomNode* raw = node.get();
    atoms_.emplace(std::move(key), std::move(node));
    return raw;
  }

  const AtomNode* function(Fn f, const Expr& arg) {
    std::string key = std::string("1") + fn_name(f) + "(" + arg.str() + ")";
    std::lock_guard lock(mutex_);
    auto it = atoms_.find(key);
    if (it != atoms_.end()) return it->second.get();
    auto node = std::make_unique<AtomNode>();
    node->key = key;
    node->is_symbol = false;
    node->fn = f;
    node->arg = arg;
    node->free = arg.free_symbols();
    const AtomNode* raw = node.get();
    atoms_.emplace(std::move(key), std::move(node));
    return raw;
  }

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, std::unique_ptr<AtomNode>> atoms_;
};

inline Expr atom_expr(const AtomNode* a) {
  return Expr::from_polys({poly::Term{{{a, 1}}, 1}}, poly::constant(1));
}

inline Expr atom_diff(const AtomNode* a, const std::string& v) {
  if (a->is_symbol) return a->name == v ? Expr(1) : Expr(0);
  if (!a->free.count(v)) return Expr(0);
  const Expr& u = a->arg;
  const Expr du = u.diff(v);
  if (du.is_zero()) return Expr(0);
  switch (a->fn) {
    case Fn::Sin:
      return cos(u) * du;
    case Fn::Cos:
      return -sin(u) * du;
    case Fn::Exp:
      return atom_expr(a) * du;
    case Fn::Log:
      return du / u;
    case Fn::Sqrt:
      return du / (Expr(2) * atom_expr(a));
  }
  return Expr(0);
}

inline double atom_value(const AtomNode* a, const Bindings& b,
                         std::unordered_map<const AtomNode*, double>& cache) {
  if (auto it = cache.find(a); it != cache.end()) return it->second;
  double v = 0;
  if (a->is_symbol) {
    auto it = b.find(a->name);
    if (it == b.end()) throw UnboundSymbol(a->name);
    v = it->second;
  } else {
    const double u = a->arg.eval(b);
    switch (a->fn) {
      case Fn::Sin:
        v = std::sin(u);
        break;
      case Fn::Cos:
        v = std::cos(u);
        break;
      case Fn::Exp:
        v = std::exp(u);
        break;
      case Fn::Log:
        if (!(u > 0)) throw DomainError("log of non-positive value");
        v = std::log(u);
        break;
      case Fn::Sqrt:
        if (u < 0) throw DomainError("sqrt of negative value");
        v = std::sqrt(u);
        break;
    }
  }
  cache.emplace(a, v);
  return v;
}

inline double eval_poly(const poly::Poly& p, const Bindings& b,
                        std::unordered_map<const AtomNode*, double>& cache) {
  double sum = 0;
  for (const auto& t : p) {
    double term = t.coef.get_d();
    for (const auto& f : t.mono) term *= std::pow(atom_value(f.atom, b, cache), f.exp);
    sum += term;
  }
  return sum;
}

inline Rational exact_atom_value(const AtomNode* a, const ExactBindings& b) {
  if (a->is_symbol) {
    auto it = b.find(a->name);
    if (it == b.end()) throw UnboundSymbol(a->name);
    return it->second;
  }
  const Rational u = a->arg.eval_exact(b);
  const Expr folded = Expr::apply(a->fn, Expr(u));
  if (auto c = folded.constant()) return *c;
  throw DomainError(std::string("no exact value for ") + fn_name(a->fn) + "(" + to_string(u) + ")");
}

inline Rational eval_poly_exact(const poly::Poly& p, const ExactBindings& b) {
  Rational sum = 0;
  for (const auto& t : p) {
    Rational term = t.coef;
    for (const auto& f : t.mono) {
      const Rational v = exact_atom_value(f.atom, b);
      for (int k = 0; k < f.exp; ++k) term *= v;
    }
    sum += term;
  }
  return sum;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Expr implementation

inline Expr::Expr() : rep_(std::make_shared<Rep>(Rep{{}, poly::constant(1)})) {}
inline Expr::Expr(int v) : Expr(Rational(v)) {}
inline Expr::Expr(long v) : Expr(Rational(v)) {}
inline Expr::Expr(const Rational& v)
    : rep_(std::make_shared<Rep>(Rep{poly::constant(v), poly::constant(1)})) {}

inline Expr Expr::symbol(const std::string& name) {
  return detail::atom_expr(detail::AtomTable::instance().symbol(name));
}

inline Expr Expr::apply(Fn f, const Expr& arg) {
  if (auto c = arg.constant()) {
    switch (f) {
      case Fn::Sin:
        if (*c == 0) return Expr(0);
        break;
      case Fn::Cos:
      case Fn::Exp:
        if (*c == 0) return Expr(1);
        break;
      case Fn::Log:
        if (*c == 1) return Expr(0);
        if (*c <= 0) throw DomainError("log of non-positive constant");
        break;
      case Fn::Sqrt: {
        if (*c < 0) throw DomainError("sqrt of negative constant");
        mpz_class n = c->get_num(), d = c->get_den();
        if (mpz_perfect_square_p(n.get_mpz_t()) && mpz_perfect_square_p(d.get_mpz_t())) {
          mpz_class rn, rd;
          mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
          mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
          Rational r(rn, rd);
          r.canonicalize();
          return Expr(r);
        }
        break;
      }
    }
  }
  // log(exp(u)) = u and exp(log(u)) = u on the real domain.
  if (arg.is_polynomial() && arg.num().size() == 1 && arg.num()[0].coef == 1 &&
      arg.num()[0].mono.size() == 1 && arg.num()[0].mono[0].exp == 1) {
    const AtomNode* inner = arg.num()[0].mono[0].atom;
    if (!inner->is_symbol) {
      if (f == Fn::Log && inner->fn == Fn::Exp) return inner->arg;
      if (f == Fn::Exp && inner->fn == Fn::Log) return inner->arg;
    }
  }
  return detail::atom_expr(detail::AtomTable::instance().function(f, arg));
}

inline Expr Expr::from_polys(poly::Poly num, poly::Poly den) {
  using namespace poly;
  if (den.empty()) throw DomainError("division by zero");
  if (num.empty()) return Expr();
  if (auto c = as_constant(den)) {
    if (*c != 1) num = scale(num, 1 / *c);
    return Expr(std::make_shared<Rep>(Rep{std::move(num), poly::constant(1)}));
  }
  Monomial g = common_monomial(num, den);
  if (!g.empty()) {
    num = divide_monomial(num, g);
    den = divide_monomial(den, g);
  }
  if (auto q = divide_exact(num, den)) return Expr(std::make_shared<Rep>(Rep{std::move(*q), poly::constant(1)}));
  if (num.size() <= den.size()) {
    if (auto q = divide_exact(den, num)) {
      // num / den = 1 / q
      num = poly::constant(1);
      den = std::move(*q);
      if (auto c = as_constant(den)) return Expr(1 / *c);
    }
  }
  const Rational lead = den.front().coef;
  if (lead != 1) {
    num = scale(num, 1 / lead);
    den = scale(den, 1 / lead);
  }
  return Expr(std::make_shared<Rep>(Rep{std::move(num), std::move(den)}));
}

inline bool Expr::is_polynomial() const { return poly::is_one(rep_->den); }

inline bool Expr::is_rational_function() const {
  for (const auto* p : {&rep_->num, &rep_->den})
    for (const auto* a : poly::atoms(*p))
      if (!a->is_symbol) return false;
  return true;
}

inline std::optional<Rational> Expr::constant() const {
  if (!is_polynomial()) return std::nullopt;
  return poly::as_constant(rep_->num);
}

inline std::set<std::string> Expr::free_symbols() const {
  std::set<std::string> out;
  for (const auto* p : {&rep_->num, &rep_->den})
    for (const auto* a : poly::atoms(*p)) out.insert(a->free.begin(), a->free.end());
  return out;
}

inline bool Expr::depends_on(const std::string& name) const {
  for (const auto* p : {&rep_->num, &rep_->den})
    for (const auto& t : *p)
      for (const auto& f : t.mono)
        if (f.atom->free.count(name)) return true;
  return false;
}

inline Expr operator+(const Expr& a, const Expr& b) {
  using namespace poly;
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (equal(a.den(), b.den())) {
    if (a.is_polynomial()) return Expr::from_polys(add(a.num(), b.num()), constant(1));
    return Expr::from_polys(add(a.num(), b.num()), a.den());
  }
  if (a.is_polynomial()) return Expr::from_polys(add(mul(a.num(), b.den()), b.num()), b.den());
  if (b.is_polynomial()) return Expr::from_polys(add(a.num(), mul(b.num(), a.den())), a.den());
  return Expr::from_polys(add(mul(a.num(), b.den()), mul(b.num(), a.den())), mul(a.den(), b.den()));
}

inline Expr operator-(const Expr& a) {
  return Expr::from_polys(poly::scale(a.num(), -1), a.den());
}

inline Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

inline Expr operator*(const Expr& a, const Expr& b) {
  using namespace poly;
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_polynomial() && b.is_polynomial())
    return Expr::from_polys(mul(a.num(), b.num()), constant(1));
  // Cancel a shared denominator/numerator before expanding.
  if (equal(a.den(), b.num())) return Expr::from_polys(a.num(), b.den());
  if (equal(b.den(), a.num())) return Expr::from_polys(b.num(), a.den());
  return Expr::from_polys(mul(a.num(), b.num()), mul(a.den(), b.den()));
}

inline Expr operator/(const Expr& a, const Expr& b) {
  using namespace poly;
  if (b.is_zero()) throw DomainError("division by zero");
  if (a.is_zero()) return Expr();
  if (equal(a.den(), b.den())) return Expr::from_polys(a.num(), b.num());
  return Expr::from_polys(mul(a.num(), b.den()), mul(a.den(), b.num()));
}

inline bool operator==(const Expr& a, const Expr& b) {
  using namespace poly;
  if (a.rep_ == b.rep_) return true;
  if (equal(a.den(), b.den())) return equal(a.num(), b.num());
  return equal(mul(a.num(), b.den()), mul(b.num(), a.den()));
}

inline int Expr::structural_compare(const Expr& a, const Expr& b) {
  if (int c = poly::compare(a.num(), b.num())) return c;
  return poly::compare(a.den(), b.den());
}

inline Expr pow(const Expr& base, long exponent) {
  using namespace poly;
  if (exponent == 0) return Expr(1);
  if (exponent < 0) {
    if (base.is_zero()) throw DomainError("zero raised to a negative power");
    return Expr::from_polys(power(base.den(), -exponent), power(base.num(), -exponent));
  }
  if (base.is_polynomial()) return Expr::from_polys(power(base.num(), exponent), constant(1));
  return Expr::from_polys(power(base.num(), exponent), power(base.den(), exponent));
}

inline Expr pow(const Expr& base, const Expr& exponent) {
  if (auto c = exponent.constant()) {
    if (c->get_den() == 1 && c->get_num().fits_slong_p()) return pow(base, c->get_num().get_si());
    if (c->get_den() == 2 && c->get_num().fits_slong_p()) return pow(sqrt(base), c->get_num().get_si());
  }
  return exp(exponent * log(base));
}

inline Expr Expr::diff(const std::string& v) const {
  auto poly_diff = [&v](const poly::Poly& p) {
    Expr out;
    for (const auto* a : poly::atoms(p)) {
      if (!a->free.count(v)) continue;
      Expr da = detail::atom_diff(a, v);
      if (da.is_zero()) continue;
      out += Expr::from_polys(poly::partial(p, a), poly::constant(1)) * da;
    }
    return out;
  };
  if (is_polynomial()) return poly_diff(num());
  if (!depends_on(v)) return Expr();
  const Expr n = Expr::from_polys(num(), poly::constant(1));
  const Expr d = Expr::from_polys(den(), poly::constant(1));
  return (poly_diff(num()) * d - n * poly_diff(den())) / (d * d);
}

inline Expr Expr::subst(const std::map<std::string, Expr>& map) const {
  if (map.empty()) return *this;
  bool touched = false;
  for (const auto& s : free_symbols())
    if (map.count(s)) {
      touched = true;
      break;
    }
  if (!touched) return *this;

  std::unordered_map<const AtomNode*, Expr> image;
  auto image_of = [&](const AtomNode* a) -> const Expr* {
    bool hit = false;
    for (const auto& s : a->free)
      if (map.count(s)) {
        hit = true;
        break;
      }
    if (!hit) return nullptr;
    auto it = image.find(a);
    if (it != image.end()) return &it->second;
    Expr e = a->is_symbol ? map.at(a->name) : Expr::apply(a->fn, a->arg.subst(map));
    return &image.emplace(a, std::move(e)).first->second;
  };

  auto subst_poly = [&](const poly::Poly& p) {
    // Polynomial images accumulate as polynomials; rational images fall back
    // to Expr arithmetic.
    poly::Poly acc;
    Expr rational_part;
    std::map<std::pair<const AtomNode*, int>, Expr> powers;
    for (const auto& t : p) {
      poly::Monomial kept;
      Expr factor(1);
      for (const auto& f : t.mono) {
        const Expr* img = image_of(f.atom);
        if (!img) {
          kept.push_back(f);
          continue;
        }
        auto key = std::make_pair(f.atom, f.exp);
        auto it = powers.find(key);
        if (it == powers.end()) it = powers.emplace(key, pow(*img, static_cast<long>(f.exp))).first;
        factor = factor * it->second;
      }
      if (factor.is_polynomial()) {
        acc = poly::add(acc, poly::mul_term(factor.num(), poly::Term{kept, t.coef}));
      } else {
        rational_part += factor * Expr::from_polys({poly::Term{kept, t.coef}}, poly::constant(1));
      }
    }
    return Expr::from_polys(std::move(acc), poly::constant(1)) + rational_part;
  };

  if (is_polynomial()) return subst_poly(num());
  return subst_poly(num()) / subst_poly(den());
}

inline double Expr::eval(const Bindings& b) const {
  std::unordered_map<const AtomNode*, double> cache;
  const double n = detail::eval_poly(num(), b, cache);
  if (is_polynomial()) return n;
  const double d = detail::eval_poly(den(), b, cache);
  if (d == 0) throw DomainError("division by zero");
  return n / d;
}

inline Rational Expr::eval_exact(const ExactBindings& b) const {
  const Rational n = detail::eval_poly_exact(num(), b);
  if (is_polynomial()) return n;
  const Rational d = detail::eval_poly_exact(den(), b);
  if (d == 0) throw DomainError("division by zero");
  return n / d;
}

inline std::string Expr::str() const {
  if (is_polynomial()) return detail::render_poly(num());
  auto wrap = [](const poly::Poly& p) {
    std::string s = detail::render_poly(p);
    const bool simple = p.size() == 1 && (p[0].mono.empty() || (p[0].coef == 1 && p[0].mono.size() == 1));
    return simple ? s : "(" + s + ")";
  };
  return wrap(num()) + "/" + wrap(den());
}

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.str(); }

// ---------------------------------------------------------------------------
// Parse-tree conversion

inline Expr to_expr(const syntax::Node& n) {
  using syntax::Kind;
  switch (n.kind) {
    case Kind::Number:
      return Expr(rational_from_literal(n.text));
    case Kind::Symbol:
      return Expr::symbol(n.text);
    case Kind::Sum:
      return to_expr(n.children[0]) + to_expr(n.children[1]);
    case Kind::Sub:
      return to_expr(n.children[0]) - to_expr(n.children[1]);
    case Kind::Prod:
      return to_expr(n.children[0]) * to_expr(n.children[1]);
    case Kind::Div:
      return to_expr(n.children[0]) / to_expr(n.children[1]);
    case Kind::Pow:
      return pow(to_expr(n.children[0]), to_expr(n.children[1]));
    case Kind::Neg:
      return -to_expr(n.children[0]);
    case Kind::Call:
      return Expr::apply(fn_from_name(n.text), to_expr(n.children[0]));
  }
  return Expr();
}

/// Parses and normalizes in one step.
inline Expr parse_expr(std::string_view text, bool allow_decimals = false) {
  return to_expr(syntax::parse(text, allow_decimals));
}

/// Throws UnknownCoordinate when `e` mentions a symbol outside `coords`.
template <class Range>
void require_symbols_in(const Expr& e, const Range& coords) {
  for (const auto& s : e.free_symbols())
    if (std::find(std::begin(coords), std::end(coords), s) == std::end(coords)) throw UnknownCoordinate(s);
}

}  // namespace jetcalc
