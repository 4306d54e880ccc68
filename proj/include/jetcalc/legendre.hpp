#pragma once

// The Legendre bundle Pi -> X of a composite manifold with coordinates
// (x^l, y^A, p^l_A), its multisymplectic form, the Legendre morphism of a
// first-order Lagrangian, momenta adapted to a connection on Y -> Sigma and
// the Hamiltonian lift of a connection on Y -> X.
//
// Momentum p^l_A is named "p_<A>_<x>".

#include <map>
#include <set>
#include <string>
#include <vector>

#include "jetcalc/bundle.hpp"
#include "jetcalc/connection.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/exterior.hpp"
#include "jetcalc/expr.hpp"

namespace jetcalc {

inline std::string momentum_name(const std::string& a, const std::string& x) { return "p_" + a + "_" + x; }

class LegendreChart {
 public:
  explicit LegendreChart(CompositeChart chart) : chart_(std::move(chart)) {
    std::set<std::string> seen;
    for (const auto& c : chart_.j1y_coords()) seen.insert(c);
    for (const auto& p : momenta())
      if (!seen.insert(p).second) throw Error("momentum name collides with a chart coordinate: '" + p + "'");
  }

  const CompositeChart& chart() const { return chart_; }

  std::vector<std::string> momenta() const {
    std::vector<std::string> out;
    for (const auto& a : chart_.vertical())
      for (const auto& x : chart_.base()) out.push_back(momentum_name(a, x));
    return out;
  }
  /// (x, s, y, p) in that order.
  std::vector<std::string> coords() const {
    auto c = chart_.y_coords();
    const auto m = momenta();
    c.insert(c.end(), m.begin(), m.end());
    return c;
  }
  /// Vertical coordinates of Pi -> X: (s, y, p).
  std::vector<std::string> vertical() const {
    auto v = chart_.vertical();
    const auto m = momenta();
    v.insert(v.end(), m.begin(), m.end());
    return v;
  }

 private:
  CompositeChart chart_;
};

/// Omega = dp^l_A ^ dy^A ^ omega (x) d_l.
inline TangentValuedForm build_multisymplectic(const LegendreChart& pi) {
  const auto& chart = pi.chart();
  const Coordinates coords(pi.coords());
  const Form omega = Form::product(coords, chart.base());
  TangentValuedForm out(coords, static_cast<int>(chart.base().size()) + 2);
  for (const auto& x : chart.base()) {
    Form leg(coords, out.degree());
    for (const auto& a : chart.vertical())
      leg += wedge(wedge(Form::differential(coords, momentum_name(a, x)), Form::differential(coords, a)), omega);
    out.add(x, leg);
  }
  return out;
}

/// A first-order Lagrangian density L(x, y, y_l) omega.
struct Lagrangian {
  Expr density;
};

inline void validate(const CompositeChart& chart, const Lagrangian& l) {
  require_symbols_in(l.density, chart.j1y_coords());
}

/// Lagrangian momenta dL/dy^A_l as functions on J1Y.
inline std::map<std::string, Expr> lagrangian_momenta(const CompositeChart& chart, const Lagrangian& l) {
  validate(chart, l);
  std::map<std::string, Expr> out;
  for (const auto& a : chart.vertical())
    for (const auto& x : chart.base()) out[momentum_name(a, x)] = l.density.diff(velocity_name(a, x));
  return out;
}

/// L-hat : J1Y -> Pi at the point p, keyed by Legendre coordinate names.
inline std::map<std::string, Expr> legendre_morphism(const CompositeChart& chart, const Lagrangian& l,
                                                     const JetPoint& p) {
  validate(chart, p);
  if (p.kind != JetKind::J1Y) throw Error("the Legendre morphism acts on J1Y points");
  std::map<std::string, Expr> out;
  for (const auto& c : chart.y_coords()) out[c] = p[c];
  for (const auto& [name, e] : lagrangian_momenta(chart, l)) out[name] = e.subst(p.values);
  return out;
}

/// Momenta adapted to A_Sigma:  p-bar^l_m = p^l_m + A^i_m p^l_i,  p-bar^l_i = p^l_i.
/// `values` holds Legendre coordinates; untouched entries pass through.
inline std::map<std::string, Expr> adapted_momenta(const SigmaConnection& as, std::map<std::string, Expr> values) {
  as.validate();
  const auto& chart = as.chart;
  Substitution at;
  for (const auto& c : chart.y_coords())
    if (auto it = values.find(c); it != values.end()) at[c] = it->second;
  for (std::size_t m = 0; m < chart.middle().size(); ++m)
    for (const auto& x : chart.base()) {
      const auto key = momentum_name(chart.middle()[m], x);
      Expr v = values.at(key);
      for (std::size_t i = 0; i < chart.fibre().size(); ++i)
        v += as.a[i][m].subst(at) * values.at(momentum_name(chart.fibre()[i], x));
      values[key] = v;
    }
  return values;
}

/// Inverse of adapted_momenta:  p^l_m = p-bar^l_m - A^i_m p-bar^l_i.
inline std::map<std::string, Expr> unadapted_momenta(const SigmaConnection& as, std::map<std::string, Expr> values) {
  as.validate();
  const auto& chart = as.chart;
  Substitution at;
  for (const auto& c : chart.y_coords())
    if (auto it = values.find(c); it != values.end()) at[c] = it->second;
  for (std::size_t m = 0; m < chart.middle().size(); ++m)
    for (const auto& x : chart.base()) {
      const auto key = momentum_name(chart.middle()[m], x);
      Expr v = values.at(key);
      for (std::size_t i = 0; i < chart.fibre().size(); ++i)
        v -= as.a[i][m].subst(at) * values.at(momentum_name(chart.fibre()[i], x));
      values[key] = v;
    }
  return values;
}

/// Constraint residual of a Lagrangian factoring through the vertical covariant
/// differential of A_Sigma:  dL/ds^m_l + A^i_m dL/dy^i_l, indexed [m][l] as
/// functions on J1Y. This is p-bar^l_m on the Legendre image and vanishes for
/// L = L'(x, y, D~).
inline ExprMatrix factored_lagrangian_constraint(const SigmaConnection& as, const Lagrangian& l) {
  as.validate();
  const auto& chart = as.chart;
  validate(chart, l);
  auto out = zero_matrix(chart.middle().size(), chart.base().size());
  for (std::size_t m = 0; m < chart.middle().size(); ++m)
    for (std::size_t k = 0; k < chart.base().size(); ++k) {
      const auto& x = chart.base()[k];
      Expr r = l.density.diff(velocity_name(chart.middle()[m], x));
      for (std::size_t i = 0; i < chart.fibre().size(); ++i)
        r += as.a[i][m] * l.density.diff(velocity_name(chart.fibre()[i], x));
      out[m][k] = r;
    }
  return out;
}

/// Substitution y^i_l -> D~^i_l(y^i_l, s^m_l) turning L'(x, y, D) into a
/// Lagrangian factored through A_Sigma. `prime` names the free D slots by the
/// velocity names of the fibre coordinates.
inline Lagrangian factor_through(const SigmaConnection& as, const Expr& prime) {
  const auto d = vertical_covariant_differential(as, generic_jet(as.chart, JetKind::J1Y));
  Substitution s;
  for (std::size_t i = 0; i < as.chart.fibre().size(); ++i)
    for (std::size_t l = 0; l < as.chart.base().size(); ++l)
      s[velocity_name(as.chart.fibre()[i], as.chart.base()[l])] = d[i][l];
  return Lagrangian{prime.subst(s)};
}

/// Lift of a connection Gamma on Y -> X to Pi -> X with a symmetric K on TX:
///   gamma = dx^l (x) [d_l + Gamma^A_l d_A
///           + (-d_B Gamma^A_l p^m_A - K^m_{nl} p^n_B + K^a_{al} p^m_B) d^B_m].
/// Gamma may depend on (x, y) but not on momenta.
inline Connection lift_to_legendre(const LegendreChart& pi, const Connection& g, const SymmetricConnection& k) {
  const auto& chart = pi.chart();
  g.validate();
  k.validate();
  if (g.base != chart.base() || g.vertical != chart.vertical())
    throw ChartMismatch("expected a connection on Y -> X over the Legendre chart");
  if (k.base != chart.base()) throw ChartMismatch("K lives on a different base");
  const auto& base = chart.base();
  const auto vert = chart.vertical();
  const std::size_t n = base.size(), nv = vert.size();
  Connection out = Connection::zero(base, pi.vertical(), pi.coords());
  for (std::size_t a = 0; a < nv; ++a) out.coef[a] = g.coef[a];
  for (std::size_t b = 0; b < nv; ++b)
    for (std::size_t mu = 0; mu < n; ++mu) {
      const std::size_t row = nv + b * n + mu;
      const Expr pmu_b = Expr::symbol(momentum_name(vert[b], base[mu]));
      for (std::size_t l = 0; l < n; ++l) {
        Expr c;
        for (std::size_t a = 0; a < nv; ++a)
          c -= g.coef[a][l].diff(vert[b]) * Expr::symbol(momentum_name(vert[a], base[mu]));
        for (std::size_t nu = 0; nu < n; ++nu)
          c -= k.at(mu, nu, l) * Expr::symbol(momentum_name(vert[b], base[nu]));
        for (std::size_t al = 0; al < n; ++al) c += k.at(al, al, l) * pmu_b;
        out.coef[row][l] = c;
      }
    }
  return out;
}

/// d(gamma _| Omega) for a connection gamma on Pi -> X. Zero exactly when
/// gamma is Hamiltonian.
inline Form hamiltonian_residual(const LegendreChart& pi, const Connection& gamma) {
  gamma.validate();
  if (gamma.base != pi.chart().base() || gamma.vertical != pi.vertical())
    throw ChartMismatch("expected a connection on the Legendre bundle");
  const Coordinates coords(pi.coords());
  const TangentValuedForm omega = build_multisymplectic(pi);
  const TangentValuedForm g = connection_form(gamma, coords);
  return exterior_derivative(contract_tangent_valued(g, omega, pi.chart().base()));
}

}  // namespace jetcalc
