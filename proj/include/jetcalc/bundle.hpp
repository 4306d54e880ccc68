#pragma once

// Charts of composite fibred manifolds Y -> Sigma -> X with coordinates
// (x^l, s^m, y^i), their first-order jet coordinates, sections, jet
// prolongation, the jet transformation law, the canonical monomorphism
// J1Y -> T*X (x) TY and the canonical surjection rho.
//
// Jet coordinate names are derived from chart names:
//   s^m_l, y^i_l   "<s>_<x>", "<y>_<x>"   (J1Y, J1Sigma)
//   y~^i_l          "<y>_t<x>"            (J1Y_Sigma)
//   y^i_m           "<y>_<s>"             (J1Y_Sigma)

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "jetcalc/error.hpp"
#include "jetcalc/exterior.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/linalg.hpp"

namespace jetcalc {

inline std::string velocity_name(const std::string& v, const std::string& x) { return v + "_" + x; }
inline std::string tilde_velocity_name(const std::string& y, const std::string& x) { return y + "_t" + x; }

using Substitution = std::map<std::string, Expr>;

class CompositeChart {
 public:
  CompositeChart(std::vector<std::string> base, std::vector<std::string> middle,
                 std::vector<std::string> fibre)
      : base_(std::move(base)), middle_(std::move(middle)), fibre_(std::move(fibre)) {
    if (base_.empty()) throw Error("chart needs at least one base coordinate");
    std::vector<std::string> all = y_coords();
    for (const auto* list : {&middle_, &fibre_})
      for (const auto& v : *list)
        for (const auto& x : base_) all.push_back(velocity_name(v, x));
    for (const auto& y : fibre_) {
      for (const auto& x : base_) all.push_back(tilde_velocity_name(y, x));
      for (const auto& s : middle_) all.push_back(velocity_name(y, s));
    }
    std::set<std::string> seen;
    for (const auto& n : all)
      if (!seen.insert(n).second) throw Error("chart coordinate names collide at '" + n + "'");
  }

  /// Plain fibred manifold Y -> X (no middle coordinates).
  static CompositeChart fibred(std::vector<std::string> base, std::vector<std::string> fibre) {
    return CompositeChart(std::move(base), {}, std::move(fibre));
  }

  const std::vector<std::string>& base() const { return base_; }
  const std::vector<std::string>& middle() const { return middle_; }
  const std::vector<std::string>& fibre() const { return fibre_; }
  bool is_composite() const { return !middle_.empty(); }

  /// Vertical coordinates of Y -> X: middle then fibre.
  std::vector<std::string> vertical() const {
    auto v = middle_;
    v.insert(v.end(), fibre_.begin(), fibre_.end());
    return v;
  }
  std::vector<std::string> sigma_coords() const { return concat(base_, middle_); }
  std::vector<std::string> y_coords() const { return concat(concat(base_, middle_), fibre_); }

  std::vector<std::string> j1sigma_coords() const {
    auto c = sigma_coords();
    for (const auto& s : middle_)
      for (const auto& x : base_) c.push_back(velocity_name(s, x));
    return c;
  }
  std::vector<std::string> j1y_coords() const {
    auto c = y_coords();
    for (const auto& v : vertical())
      for (const auto& x : base_) c.push_back(velocity_name(v, x));
    return c;
  }
  std::vector<std::string> j1ysigma_coords() const {
    auto c = y_coords();
    for (const auto& y : fibre_)
      for (const auto& x : base_) c.push_back(tilde_velocity_name(y, x));
    for (const auto& y : fibre_)
      for (const auto& s : middle_) c.push_back(velocity_name(y, s));
    return c;
  }

  friend bool operator==(const CompositeChart&, const CompositeChart&) = default;

 private:
  static std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  std::vector<std::string> base_, middle_, fibre_;
};

enum class SectionKind {
  SigmaOverX,   // h : X -> Sigma, components s^m(x)
  FibreOverSigma,  // s_Sigma : Sigma -> Y_Sigma, components y^i(x, s)
  TotalOverX,   // s : X -> Y, components s^m(x), y^i(x)
  RestrictedOverX  // s_h : X -> Y_h, components y^i(x)
};

struct Section {
  SectionKind kind;
  std::map<std::string, Expr> components;

  const Expr& operator[](const std::string& name) const {
    auto it = components.find(name);
    if (it == components.end()) throw UnknownCoordinate(name);
    return it->second;
  }
};

/// Checks component names and source-level symbol references.
inline void validate(const CompositeChart& chart, const Section& s) {
  std::vector<std::string> targets, source;
  switch (s.kind) {
    case SectionKind::SigmaOverX:
      targets = chart.middle();
      source = chart.base();
      break;
    case SectionKind::FibreOverSigma:
      targets = chart.fibre();
      source = chart.sigma_coords();
      break;
    case SectionKind::TotalOverX:
      targets = chart.vertical();
      source = chart.base();
      break;
    case SectionKind::RestrictedOverX:
      targets = chart.fibre();
      source = chart.base();
      break;
  }
  for (const auto& t : targets)
    if (!s.components.count(t)) throw Error("section is missing component '" + t + "'");
  for (const auto& [name, e] : s.components) {
    if (std::find(targets.begin(), targets.end(), name) == targets.end()) throw UnknownCoordinate(name);
    require_symbols_in(e, source);
  }
}

enum class JetKind { J1Y, J1Sigma, J1YSigma };

/// A point of, or a section into, a first-order jet manifold: every jet
/// coordinate is assigned an Expr (a number for points, a function of the base
/// for sections, the coordinate symbol itself for the generic point).
struct JetPoint {
  JetKind kind;
  std::map<std::string, Expr> values;

  const Expr& operator[](const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw UnknownCoordinate(name);
    return it->second;
  }

  Substitution as_substitution() const { return values; }
};

inline std::vector<std::string> jet_coords(const CompositeChart& chart, JetKind kind) {
  switch (kind) {
    case JetKind::J1Y:
      return chart.j1y_coords();
    case JetKind::J1Sigma:
      return chart.j1sigma_coords();
    case JetKind::J1YSigma:
      return chart.j1ysigma_coords();
  }
  return {};
}

/// The point whose coordinates are the coordinate symbols themselves.
inline JetPoint generic_jet(const CompositeChart& chart, JetKind kind) {
  JetPoint p{kind, {}};
  for (const auto& c : jet_coords(chart, kind)) p.values.emplace(c, Expr::symbol(c));
  return p;
}

inline void validate(const CompositeChart& chart, const JetPoint& p) {
  const auto coords = jet_coords(chart, p.kind);
  if (p.values.size() != coords.size()) throw ChartMismatch("jet point does not match chart coordinates");
  for (const auto& c : coords)
    if (!p.values.count(c)) throw ChartMismatch("jet point lacks coordinate '" + c + "'");
}

/// Fibred morphism of Y over a base diffeomorphism, written in the same
/// coordinate names as the source chart.
struct FibredMorphism {
  std::map<std::string, Expr> base;      // x'^l(x)
  std::map<std::string, Expr> vertical;  // y'^A(x, y)
};

inline Substitution as_substitution(const FibredMorphism& f) {
  Substitution s = f.base;
  s.insert(f.vertical.begin(), f.vertical.end());
  return s;
}

/// (f o g)(p) = f(g(p)).
inline FibredMorphism compose(const FibredMorphism& f, const FibredMorphism& g) {
  const Substitution inner = as_substitution(g);
  FibredMorphism out;
  for (const auto& [k, e] : f.base) out.base[k] = e.subst(inner);
  for (const auto& [k, e] : f.vertical) out.vertical[k] = e.subst(inner);
  return out;
}

/// J1 prolongation of a section over X. TotalOverX sections land in J1Y,
/// SigmaOverX sections in J1Sigma; base coordinates map to themselves.
inline JetPoint jet_prolong(const CompositeChart& chart, const Section& s) {
  validate(chart, s);
  if (s.kind != SectionKind::TotalOverX && s.kind != SectionKind::SigmaOverX)
    throw Error("jet prolongation needs a section over the base");
  JetPoint out{s.kind == SectionKind::TotalOverX ? JetKind::J1Y : JetKind::J1Sigma, {}};
  for (const auto& x : chart.base()) out.values.emplace(x, Expr::symbol(x));
  for (const auto& [v, e] : s.components) {
    out.values.emplace(v, e);
    for (const auto& x : chart.base()) out.values.emplace(velocity_name(v, x), e.diff(x));
  }
  return out;
}

/// J1 prolongation of a section of Y_Sigma -> Sigma, as a J1Y_Sigma-valued
/// function of (x, s).
inline JetPoint jet_prolong_fibre(const CompositeChart& chart, const Section& s) {
  validate(chart, s);
  if (s.kind != SectionKind::FibreOverSigma) throw Error("expected a section of Y_Sigma");
  JetPoint out{JetKind::J1YSigma, {}};
  for (const auto& c : chart.sigma_coords()) out.values.emplace(c, Expr::symbol(c));
  for (const auto& [y, e] : s.components) {
    out.values.emplace(y, e);
    for (const auto& x : chart.base()) out.values.emplace(tilde_velocity_name(y, x), e.diff(x));
    for (const auto& m : chart.middle()) out.values.emplace(velocity_name(y, m), e.diff(m));
  }
  return out;
}

/// s_Sigma o h as a section of Y -> X.
inline Section compose(const CompositeChart& chart, const Section& fibre_section, const Section& h) {
  validate(chart, fibre_section);
  validate(chart, h);
  if (fibre_section.kind != SectionKind::FibreOverSigma || h.kind != SectionKind::SigmaOverX)
    throw Error("composition needs a Y_Sigma section and a Sigma section");
  Section out{SectionKind::TotalOverX, h.components};
  for (const auto& [y, e] : fibre_section.components) out.components[y] = e.subst(h.components);
  return out;
}

/// Splits s into h = pi o s and an extension s_Sigma with s = s_Sigma o h. The
/// extension is constant along the Sigma fibres.
inline std::pair<Section, Section> decompose(const CompositeChart& chart, const Section& s) {
  validate(chart, s);
  if (s.kind != SectionKind::TotalOverX) throw Error("decomposition needs a section of Y -> X");
  Section h{SectionKind::SigmaOverX, {}};
  Section ext{SectionKind::FibreOverSigma, {}};
  for (const auto& m : chart.middle()) h.components[m] = s[m];
  for (const auto& y : chart.fibre()) ext.components[y] = s[y];
  return {h, ext};
}

/// Substitution pinning s = h(x) and s_l = d_l h.
inline Substitution section_pin(const CompositeChart& chart, const Section& h) {
  validate(chart, h);
  if (h.kind != SectionKind::SigmaOverX) throw Error("expected a section of Sigma -> X");
  Substitution pin;
  for (const auto& [m, e] : h.components) {
    pin[m] = e;
    for (const auto& x : chart.base()) pin[velocity_name(m, x)] = e.diff(x);
  }
  return pin;
}

/// An expression on Y or J1Y restricted to Y_h / J1Y_h.
inline Expr restrict_to_section(const CompositeChart& chart, const Section& h, const Expr& e) {
  return e.subst(section_pin(chart, h));
}

inline JetPoint restrict_to_section(const CompositeChart& chart, const Section& h, const JetPoint& p) {
  const Substitution pin = section_pin(chart, h);
  JetPoint out{p.kind, {}};
  for (const auto& [k, e] : p.values) out.values.emplace(k, e.subst(pin));
  return out;
}

/// A section of Y covering h viewed as a section of Y_h.
inline Section restrict_to_section(const CompositeChart& chart, const Section& h, const Section& s) {
  validate(chart, s);
  if (s.kind != SectionKind::TotalOverX) throw Error("expected a section of Y -> X");
  for (const auto& m : chart.middle())
    if (s[m] != h[m]) throw Error("section does not cover h along '" + m + "'");
  Section out{SectionKind::RestrictedOverX, {}};
  for (const auto& y : chart.fibre()) out.components[y] = s[y];
  return out;
}

/// Inverse of the previous: a section of Y_h as the section of Y covering h.
inline Section embed_restricted(const CompositeChart& chart, const Section& h, const Section& s_h) {
  validate(chart, s_h);
  if (s_h.kind != SectionKind::RestrictedOverX) throw Error("expected a section of Y_h");
  Section out{SectionKind::TotalOverX, h.components};
  for (const auto& [y, e] : s_h.components) out.components[y] = e;
  return out;
}

/// Jet prolongation of a fibred morphism:
///   y'^A_m = (d_l F^A + d_B F^A y^B_l) (dx/dx')^l_m
/// evaluated at the J1Y point p. Throws DomainError on a singular base Jacobian.
inline JetPoint jet_transform(const CompositeChart& chart, const FibredMorphism& f, const JetPoint& p) {
  validate(chart, p);
  if (p.kind != JetKind::J1Y) throw Error("jet_transform acts on J1Y points");
  const auto& base = chart.base();
  const auto vert = chart.vertical();
  for (const auto& x : base)
    if (!f.base.count(x)) throw Error("morphism lacks base component '" + x + "'");
  for (const auto& v : vert)
    if (!f.vertical.count(v)) throw Error("morphism lacks vertical component '" + v + "'");
  for (const auto& [x, e] : f.base) require_symbols_in(e, base);

  Substitution at;
  for (const auto& c : chart.y_coords()) at[c] = p[c];
  const std::size_t n = base.size();
  ExprMatrix jac = zero_matrix(n, n);  // jac[m][l] = d x'^m / d x^l
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t l = 0; l < n; ++l) jac[m][l] = f.base.at(base[m]).diff(base[l]).subst(at);
  if (determinant(jac).is_zero()) throw DomainError("singular base Jacobian");
  const ExprMatrix inv = inverse(jac);  // inv[l][m] = d x^l / d x'^m

  JetPoint out{JetKind::J1Y, {}};
  for (const auto& x : base) out.values[x] = f.base.at(x).subst(at);
  for (const auto& a : vert) {
    const Expr& fa = f.vertical.at(a);
    out.values[a] = fa.subst(at);
    std::vector<Expr> total(n);
    for (std::size_t l = 0; l < n; ++l) {
      Expr t = fa.diff(base[l]);
      for (const auto& b : vert) t += fa.diff(b) * Expr::symbol(velocity_name(b, base[l]));
      total[l] = t.subst(p.values);
    }
    for (std::size_t m = 0; m < n; ++m) {
      Expr v;
      for (std::size_t l = 0; l < n; ++l) v += total[l] * inv[l][m];
      out.values[velocity_name(a, base[m])] = v;
    }
  }
  return out;
}

/// lambda = dx^l (x) (d_l + y^A_l d_A) at the J1Y point p, over the Y coordinates.
inline TangentValuedForm canonical_monomorphism(const CompositeChart& chart, const JetPoint& p) {
  validate(chart, p);
  if (p.kind != JetKind::J1Y) throw Error("canonical monomorphism needs a J1Y point");
  const Coordinates coords(chart.y_coords());
  TangentValuedForm out(coords, 1);
  for (const auto& x : chart.base()) out.add(x, Form::differential(coords, x));
  for (const auto& a : chart.vertical()) {
    Form f(coords, 1);
    for (const auto& x : chart.base()) f.add_term({coords.index(x)}, p[velocity_name(a, x)]);
    out.add(a, f);
  }
  return out;
}

/// rho : J1Sigma x_Sigma J1Y_Sigma -> J1Y,  y^i_l = y^i_m s^m_l + y~^i_l.
inline JetPoint rho(const CompositeChart& chart, const JetPoint& jsigma, const JetPoint& jysigma) {
  validate(chart, jsigma);
  validate(chart, jysigma);
  if (jsigma.kind != JetKind::J1Sigma || jysigma.kind != JetKind::J1YSigma)
    throw Error("rho takes a J1Sigma point and a J1Y_Sigma point");
  for (const auto& c : chart.sigma_coords())
    if (jsigma[c] != jysigma[c]) throw ChartMismatch("jets disagree on shared coordinate '" + c + "'");
  JetPoint out{JetKind::J1Y, {}};
  for (const auto& c : chart.y_coords()) out.values[c] = jysigma[c];
  for (const auto& m : chart.middle())
    for (const auto& x : chart.base()) out.values[velocity_name(m, x)] = jsigma[velocity_name(m, x)];
  for (const auto& y : chart.fibre())
    for (const auto& x : chart.base()) {
      Expr v = jysigma[tilde_velocity_name(y, x)];
      for (const auto& m : chart.middle())
        v += jysigma[velocity_name(y, m)] * jsigma[velocity_name(m, x)];
      out.values[velocity_name(y, x)] = v;
    }
  return out;
}

}  // namespace jetcalc
