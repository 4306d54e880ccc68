#pragma once

// Differential forms and vector fields with Expr coefficients over an ordered
// coordinate list. Forms are sparse: strictly increasing index tuples map to
// coefficients, so antisymmetry is canonicalized at insertion.

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "jetcalc/error.hpp"
#include "jetcalc/expr.hpp"

namespace jetcalc {

class Coordinates {
 public:
  Coordinates() : names_(std::make_shared<std::vector<std::string>>()) {}
  Coordinates(std::vector<std::string> names)  // NOLINT: implicit from a name list
      : names_(std::make_shared<std::vector<std::string>>(std::move(names))) {
    auto sorted = *names_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw Error("duplicate coordinate name in chart");
  }
  Coordinates(std::initializer_list<std::string> names)
      : Coordinates(std::vector<std::string>(names)) {}

  std::size_t size() const { return names_->size(); }
  const std::string& operator[](std::size_t i) const { return (*names_)[i]; }
  const std::vector<std::string>& names() const { return *names_; }
  auto begin() const { return names_->begin(); }
  auto end() const { return names_->end(); }

  bool contains(const std::string& name) const {
    return std::find(names_->begin(), names_->end(), name) != names_->end();
  }
  int index(const std::string& name) const {
    auto it = std::find(names_->begin(), names_->end(), name);
    if (it == names_->end()) throw UnknownCoordinate(name);
    return static_cast<int>(it - names_->begin());
  }

  friend bool operator==(const Coordinates& a, const Coordinates& b) {
    return a.names_ == b.names_ || *a.names_ == *b.names_;
  }

 private:
  std::shared_ptr<const std::vector<std::string>> names_;
};

/// Components v^a against the coordinate directions d/da. Missing entries are zero.
struct VectorField {
  std::map<std::string, Expr> components;

  static VectorField basis(const std::string& name) { return VectorField{{{name, Expr(1)}}}; }
  Expr operator[](const std::string& name) const {
    auto it = components.find(name);
    return it == components.end() ? Expr() : it->second;
  }
  /// Directional derivative v(f).
  Expr apply(const Expr& f) const {
    Expr out;
    for (const auto& [name, c] : components)
      if (!c.is_zero() && f.depends_on(name)) out += c * f.diff(name);
    return out;
  }
};

class Form {
 public:
  using Index = std::vector<int>;

  Form(Coordinates coords, int degree) : coords_(std::move(coords)), degree_(degree) {
    if (degree < 0 || static_cast<std::size_t>(degree) > coords_.size())
      throw DegreeError("form degree " + std::to_string(degree) + " exceeds dimension " +
                        std::to_string(coords_.size()));
  }

  static Form scalar(Coordinates coords, const Expr& f) {
    Form out(std::move(coords), 0);
    out.add_term({}, f);
    return out;
  }
  /// The basis 1-form d(name).
  static Form differential(Coordinates coords, const std::string& name) {
    Form out(coords, 1);
    out.add_term({coords.index(name)}, Expr(1));
    return out;
  }
  /// d(names[0]) ^ d(names[1]) ^ ... in the given order.
  static Form product(Coordinates coords, std::span<const std::string> names, const Expr& coef = Expr(1)) {
    Form out(coords, static_cast<int>(names.size()));
    Index idx;
    for (const auto& n : names) idx.push_back(coords.index(n));
    out.add_term(std::move(idx), coef);
    return out;
  }

  const Coordinates& coords() const { return coords_; }
  int degree() const { return degree_; }
  const std::map<Index, Expr>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Adds coef * dx^{idx[0]} ^ ... with idx in any order; repeated indices vanish.
  void add_term(Index idx, const Expr& coef) {
    if (static_cast<int>(idx.size()) != degree_) throw DegreeError("term degree mismatch");
    if (coef.is_zero()) return;
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = i + 1; j < idx.size(); ++j) {
        if (idx[i] == idx[j]) return;
        if (idx[i] > idx[j]) sign = -sign;
      }
    std::sort(idx.begin(), idx.end());
    auto it = terms_.find(idx);
    if (it == terms_.end()) {
      terms_.emplace(std::move(idx), sign > 0 ? coef : -coef);
    } else {
      it->second = sign > 0 ? it->second + coef : it->second - coef;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  /// Coefficient of d(names[0]) ^ ... with the sign of the given order.
  Expr coefficient(std::span<const std::string> names) const {
    Form probe(coords_, degree_);
    Index idx;
    for (const auto& n : names) idx.push_back(coords_.index(n));
    probe.add_term(idx, Expr(1));
    if (probe.is_zero()) return Expr();
    const auto& [key, sign] = *probe.terms_.begin();
    auto it = terms_.find(key);
    if (it == terms_.end()) return Expr();
    return it->second * sign;
  }

  Form map_coefficients(const std::function<Expr(const Expr&)>& f) const {
    Form out(coords_, degree_);
    for (const auto& [idx, c] : terms_) out.add_term(idx, f(c));
    return out;
  }

  friend Form operator+(const Form& a, const Form& b) {
    a.require_compatible(b);
    Form out = a;
    for (const auto& [idx, c] : b.terms_) out.add_term(idx, c);
    return out;
  }
  friend Form operator-(const Form& a) {
    return a.map_coefficients([](const Expr& c) { return -c; });
  }
  friend Form operator-(const Form& a, const Form& b) { return a + (-b); }
  friend Form operator*(const Expr& f, const Form& a) {
    return a.map_coefficients([&f](const Expr& c) { return f * c; });
  }
  Form& operator+=(const Form& o) { return *this = *this + o; }

  friend bool operator==(const Form& a, const Form& b) { return (a - b).is_zero(); }

  /// Sum of `coef * dA^dB` terms in the expression grammar.
  std::string str() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (const auto& [idx, c] : terms_) {
      if (!out.empty()) out += " + ";
      std::string coef = c.str();
      const bool simple = c.is_polynomial() && c.num().size() == 1;
      if (idx.empty()) {
        out += simple ? coef : "(" + coef + ")";
        continue;
      }
      std::string basis;
      for (int i : idx) basis += (basis.empty() ? "d" : "^d") + coords_[static_cast<std::size_t>(i)];
      out += (simple ? coef : "(" + coef + ")") + " * " + basis;
    }
    return out;
  }

  void require_compatible(const Form& b) const {
    if (!(coords_ == b.coords_)) throw ChartMismatch("forms over different coordinate lists");
    if (degree_ != b.degree_) throw DegreeError("adding forms of different degree");
  }

 private:
  Coordinates coords_;
  int degree_;
  std::map<Index, Expr> terms_;
};

inline Form wedge(const Form& a, const Form& b) {
  if (!(a.coords() == b.coords())) throw ChartMismatch("wedge of forms over different coordinate lists");
  const int deg = a.degree() + b.degree();
  if (static_cast<std::size_t>(deg) > a.coords().size())
    throw DegreeError("wedge degree " + std::to_string(deg) + " exceeds dimension");
  Form out(a.coords(), deg);
  for (const auto& [i, ca] : a.terms())
    for (const auto& [j, cb] : b.terms()) {
      Form::Index idx = i;
      idx.insert(idx.end(), j.begin(), j.end());
      out.add_term(std::move(idx), ca * cb);
    }
  return out;
}

inline Form exterior_derivative(const Form& a) {
  const auto& coords = a.coords();
  if (static_cast<std::size_t>(a.degree()) == coords.size()) return Form(coords, a.degree());
  Form out(coords, a.degree() + 1);
  for (const auto& [idx, c] : a.terms())
    for (std::size_t k = 0; k < coords.size(); ++k) {
      if (!c.depends_on(coords[k])) continue;
      Form::Index j{static_cast<int>(k)};
      j.insert(j.end(), idx.begin(), idx.end());
      out.add_term(std::move(j), c.diff(coords[k]));
    }
  return out;
}

inline Form interior_product(const VectorField& v, const Form& a) {
  if (a.degree() == 0) throw DegreeError("interior product of a 0-form");
  for (const auto& [name, c] : v.components)
    if (!a.coords().contains(name)) throw UnknownCoordinate(name);
  Form out(a.coords(), a.degree() - 1);
  for (const auto& [idx, c] : a.terms())
    for (std::size_t s = 0; s < idx.size(); ++s) {
      const Expr comp = v[a.coords()[static_cast<std::size_t>(idx[s])]];
      if (comp.is_zero()) continue;
      Form::Index rest = idx;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(s));
      out.add_term(std::move(rest), (s % 2 == 0) ? comp * c : -(comp * c));
    }
  return out;
}

/// Sum over output directions A of Form_A (x) d/dA. Every leg has one degree.
class TangentValuedForm {
 public:
  TangentValuedForm(Coordinates coords, int degree) : coords_(std::move(coords)), degree_(degree) {}

  const Coordinates& coords() const { return coords_; }
  int degree() const { return degree_; }
  const std::map<std::string, Form>& legs() const { return legs_; }

  void add(const std::string& direction, const Form& f) {
    if (!coords_.contains(direction)) throw UnknownCoordinate(direction);
    if (!(f.coords() == coords_)) throw ChartMismatch("leg over a different coordinate list");
    if (f.degree() != degree_) throw DegreeError("leg degree mismatch in tangent-valued form");
    auto it = legs_.find(direction);
    if (it == legs_.end()) {
      if (!f.is_zero()) legs_.emplace(direction, f);
    } else {
      it->second += f;
      if (it->second.is_zero()) legs_.erase(it);
    }
  }

  Form leg(const std::string& direction) const {
    auto it = legs_.find(direction);
    return it == legs_.end() ? Form(coords_, degree_) : it->second;
  }

  friend bool operator==(const TangentValuedForm& a, const TangentValuedForm& b) {
    if (!(a.coords_ == b.coords_) || a.degree_ != b.degree_) return false;
    std::set<std::string> dirs;
    for (const auto& [k, f] : a.legs_) dirs.insert(k);
    for (const auto& [k, f] : b.legs_) dirs.insert(k);
    for (const auto& k : dirs)
      if (!(a.leg(k) == b.leg(k))) return false;
    return true;
  }

  std::string str() const {
    if (legs_.empty()) return "0";
    std::string out;
    for (const auto& [dir, f] : legs_) {
      if (!out.empty()) out += " + ";
      out += "(" + f.str() + ") (x) d/d" + dir;
    }
    return out;
  }

 private:
  Coordinates coords_;
  int degree_;
  std::map<std::string, Form> legs_;
};

/// gamma _| T for a connection-shaped tangent-valued 1-form
/// gamma = dx^l (x) (d_l + gamma^A_l d_A) and T = sum_l T_l (x) d_l:
/// the scalar form sum_l i_{e_l} T_l with e_l = d_l + gamma^A_l d_A.
/// The directions of T's legs are taken as the base directions.
inline Form contract_tangent_valued(const TangentValuedForm& gamma, const TangentValuedForm& t,
                                    std::span<const std::string> base) {
  if (!(gamma.coords() == t.coords())) throw ChartMismatch("contraction across different charts");
  if (gamma.degree() != 1) throw DegreeError("contraction needs a tangent-valued 1-form");
  if (t.degree() < 1) throw DegreeError("contraction into a 0-form");
  const auto& coords = t.coords();
  for (const auto& [dir, f] : t.legs())
    if (std::find(base.begin(), base.end(), dir) == base.end())
      throw ChartMismatch("output direction '" + dir + "' is not a base direction");
  Form out(coords, t.degree() - 1);
  for (const auto& lambda : base) {
    VectorField e;
    for (const auto& [dir, f] : gamma.legs()) {
      const Expr c = f.coefficient(std::span<const std::string>(&lambda, 1));
      if (!c.is_zero()) e.components[dir] = c;
    }
    for (const auto& mu : base)
      if (e[mu] != Expr(mu == lambda ? 1 : 0))
        throw ChartMismatch("contracting form is not connection-shaped along " + lambda);
    out += interior_product(e, t.leg(lambda));
  }
  return out;
}

/// Base directions default to the output directions of `t`.
inline Form contract_tangent_valued(const TangentValuedForm& gamma, const TangentValuedForm& t) {
  std::vector<std::string> base;
  for (const auto& [dir, f] : t.legs()) base.push_back(dir);
  return contract_tangent_valued(gamma, t, base);
}

}  // namespace jetcalc
