#pragma once

// Connections as coefficient tables over a chart.
//
//   Connection        Gamma = dx^l (x) (d_l + Gamma^A_l d_A)
//   SigmaConnection   A_Sigma = dx^l (x) (d_l + A~^i_l d_i) + ds^m (x) (d_m + A^i_m d_i)
//   LinearConnection  dx^l (x) (d_l + Gamma^m_l(s) d_m + A^i_{jl}(s) y^j d_i)
//   SymmetricConnection K^m_{nl}(x) = K^m_{ln}(x)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "jetcalc/bundle.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/exterior.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/linalg.hpp"

namespace jetcalc {

namespace detail {

inline std::size_t position(const std::vector<std::string>& list, const std::string& name) {
  auto it = std::find(list.begin(), list.end(), name);
  if (it == list.end()) throw UnknownCoordinate(name);
  return static_cast<std::size_t>(it - list.begin());
}

inline void require_matrix_symbols(const ExprMatrix& m, const std::vector<std::string>& domain) {
  for (const auto& row : m)
    for (const auto& e : row) require_symbols_in(e, domain);
}

inline bool matrices_equal(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (a[i][j] != b[i][j]) return false;
  }
  return true;
}

}  // namespace detail

struct Connection {
  std::vector<std::string> base;
  std::vector<std::string> vertical;
  std::vector<std::string> domain;  // coordinates the coefficients may reference
  ExprMatrix coef;                  // coef[A][l]

  static Connection zero(std::vector<std::string> base, std::vector<std::string> vertical,
                         std::vector<std::string> domain) {
    Connection c{std::move(base), std::move(vertical), std::move(domain), {}};
    c.coef = zero_matrix(c.vertical.size(), c.base.size());
    return c;
  }
  /// Connection on Sigma -> X.
  static Connection on_sigma(const CompositeChart& chart) {
    return zero(chart.base(), chart.middle(), chart.sigma_coords());
  }
  /// Connection on Y -> X (vertical directions s^m then y^i).
  static Connection on_total(const CompositeChart& chart) {
    return zero(chart.base(), chart.vertical(), chart.y_coords());
  }

  Expr& at(const std::string& a, const std::string& l) {
    return coef[detail::position(vertical, a)][detail::position(base, l)];
  }
  const Expr& at(const std::string& a, const std::string& l) const {
    return coef[detail::position(vertical, a)][detail::position(base, l)];
  }

  void validate() const {
    if (coef.size() != vertical.size()) throw ChartMismatch("connection row count mismatch");
    for (const auto& row : coef)
      if (row.size() != base.size()) throw ChartMismatch("connection column count mismatch");
    detail::require_matrix_symbols(coef, domain);
  }

  friend bool operator==(const Connection& a, const Connection& b) {
    return a.base == b.base && a.vertical == b.vertical && detail::matrices_equal(a.coef, b.coef);
  }
};

/// Soldering forms model the affine space of connections: Gamma + sigma.
inline Connection add_soldering(const Connection& c, const ExprMatrix& soldering) {
  if (soldering.size() != c.coef.size()) throw ChartMismatch("soldering form shape mismatch");
  Connection out = c;
  for (std::size_t a = 0; a < out.coef.size(); ++a) {
    if (soldering[a].size() != c.base.size()) throw ChartMismatch("soldering form shape mismatch");
    for (std::size_t l = 0; l < c.base.size(); ++l) out.coef[a][l] += soldering[a][l];
  }
  return out;
}

/// The connection as the tangent-valued 1-form dx^l (x) (d_l + Gamma^A_l d_A)
/// over `coords` (defaults to its domain).
inline TangentValuedForm connection_form(const Connection& c, std::optional<Coordinates> coords = {}) {
  const Coordinates cs = coords ? *coords : Coordinates(c.domain);
  TangentValuedForm out(cs, 1);
  for (const auto& l : c.base) out.add(l, Form::differential(cs, l));
  for (std::size_t a = 0; a < c.vertical.size(); ++a) {
    Form f(cs, 1);
    for (std::size_t l = 0; l < c.base.size(); ++l) f.add_term({cs.index(c.base[l])}, c.coef[a][l]);
    out.add(c.vertical[a], f);
  }
  return out;
}

/// D_Gamma = (y^A_l - Gamma^A_l) dx^l (x) d_A at the jet point p; result[A][l].
inline ExprMatrix covariant_differential(const Connection& g, const JetPoint& p) {
  g.validate();
  auto out = zero_matrix(g.vertical.size(), g.base.size());
  for (std::size_t a = 0; a < g.vertical.size(); ++a)
    for (std::size_t l = 0; l < g.base.size(); ++l) {
      auto it = p.values.find(velocity_name(g.vertical[a], g.base[l]));
      if (it == p.values.end()) throw ChartMismatch("jet point is not on the connection's chart");
      out[a][l] = it->second - g.coef[a][l].subst(p.values);
    }
  return out;
}

struct SigmaConnection {
  CompositeChart chart;
  ExprMatrix tilde;  // A~^i_l, [i][l]
  ExprMatrix a;      // A^i_m, [i][m]

  explicit SigmaConnection(CompositeChart c)
      : chart(std::move(c)),
        tilde(zero_matrix(chart.fibre().size(), chart.base().size())),
        a(zero_matrix(chart.fibre().size(), chart.middle().size())) {}

  Expr& tilde_at(const std::string& i, const std::string& l) {
    return tilde[detail::position(chart.fibre(), i)][detail::position(chart.base(), l)];
  }
  Expr& a_at(const std::string& i, const std::string& m) {
    return a[detail::position(chart.fibre(), i)][detail::position(chart.middle(), m)];
  }

  void validate() const {
    if (tilde.size() != chart.fibre().size() || a.size() != chart.fibre().size())
      throw ChartMismatch("sigma connection row count mismatch");
    detail::require_matrix_symbols(tilde, chart.y_coords());
    detail::require_matrix_symbols(a, chart.y_coords());
  }
};

inline void require_sigma_connection(const CompositeChart& chart, const Connection& g) {
  if (g.base != chart.base() || g.vertical != chart.middle())
    throw ChartMismatch("expected a connection on Sigma -> X over the same chart");
}

/// A = dx^l (x) [d_l + Gamma^m_l d_m + (A^i_m Gamma^m_l + A~^i_l) d_i] on Y -> X.
inline Connection composite_connection(const SigmaConnection& as, const Connection& g) {
  as.validate();
  g.validate();
  require_sigma_connection(as.chart, g);
  const auto& chart = as.chart;
  Connection out = Connection::on_total(chart);
  const std::size_t k = chart.middle().size();
  for (std::size_t m = 0; m < k; ++m) out.coef[m] = g.coef[m];
  for (std::size_t i = 0; i < chart.fibre().size(); ++i)
    for (std::size_t l = 0; l < chart.base().size(); ++l) {
      Expr c = as.tilde[i][l];
      for (std::size_t m = 0; m < k; ++m) c += as.a[i][m] * g.coef[m][l];
      out.coef[k + i][l] = c;
    }
  return out;
}

/// A_h = dx^l (x) [d_l + (A^i_m d_l h^m + A~^i_l) d_i] on Y_h -> X.
inline Connection reduce_connection(const SigmaConnection& as, const Section& h) {
  as.validate();
  const auto& chart = as.chart;
  const Substitution pin = section_pin(chart, h);
  std::vector<std::string> domain = chart.base();
  domain.insert(domain.end(), chart.fibre().begin(), chart.fibre().end());
  Connection out = Connection::zero(chart.base(), chart.fibre(), domain);
  for (std::size_t i = 0; i < chart.fibre().size(); ++i)
    for (std::size_t l = 0; l < chart.base().size(); ++l) {
      Expr c = as.tilde[i][l];
      for (std::size_t m = 0; m < chart.middle().size(); ++m)
        c += as.a[i][m] * h[chart.middle()[m]].diff(chart.base()[l]);
      out.coef[i][l] = c.subst(pin);
    }
  return out;
}

/// Restriction of a connection on Y -> X to the submanifold Y_h.
inline Connection restrict_connection(const CompositeChart& chart, const Connection& a, const Section& h) {
  if (a.base != chart.base() || a.vertical != chart.vertical())
    throw ChartMismatch("expected a connection on Y -> X over the same chart");
  const Substitution pin = section_pin(chart, h);
  std::vector<std::string> domain = chart.base();
  domain.insert(domain.end(), chart.fibre().begin(), chart.fibre().end());
  Connection out = Connection::zero(chart.base(), chart.fibre(), domain);
  const std::size_t k = chart.middle().size();
  for (std::size_t i = 0; i < chart.fibre().size(); ++i)
    for (std::size_t l = 0; l < chart.base().size(); ++l) out.coef[i][l] = a.coef[k + i][l].subst(pin);
  return out;
}

/// Uniform random sample points in [-1, 1]^d for the given symbols.
inline std::vector<Bindings> sample_points(const std::set<std::string>& symbols, std::size_t count,
                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<Bindings> out(count);
  for (auto& b : out)
    for (const auto& s : symbols) b[s] = dist(rng);
  return out;
}

/// Largest |e(b)| over the points; points hitting a domain error are skipped.
inline double max_abs_residual(const std::vector<Expr>& residual, const std::vector<Bindings>& points) {
  double worst = 0;
  for (const auto& e : residual) {
    if (e.is_zero()) continue;
    for (const auto& b : points) {
      try {
        worst = std::max(worst, std::abs(e.eval(b)));
      } catch (const DomainError&) {
      }
    }
  }
  return worst;
}

struct IntegralCheck {
  bool integral;
  bool symbolic;             // decided by the normal form
  ExprMatrix residual;       // Gamma^m_l(h) - d_l h^m, [m][l]
  double max_numeric = 0.0;  // set when the numeric fallback ran
};

/// Tests Gamma o h = J1 h. Residuals containing function atoms that the normal
/// form cannot cancel fall back to 64 random points at tolerance 1e-9.
inline IntegralCheck is_integral_section(const CompositeChart& chart, const Connection& g, const Section& h) {
  require_sigma_connection(chart, g);
  validate(chart, h);
  IntegralCheck out{true, true, zero_matrix(chart.middle().size(), chart.base().size())};
  std::vector<Expr> flat;
  bool atoms = false;
  for (std::size_t m = 0; m < chart.middle().size(); ++m)
    for (std::size_t l = 0; l < chart.base().size(); ++l) {
      const Expr r = g.coef[m][l].subst(h.components) - h[chart.middle()[m]].diff(chart.base()[l]);
      out.residual[m][l] = r;
      if (!r.is_zero()) {
        flat.push_back(r);
        if (!r.is_rational_function()) atoms = true;
      }
    }
  if (flat.empty()) return out;
  if (!atoms) {
    out.integral = false;
    return out;
  }
  std::set<std::string> syms;
  for (const auto& r : flat) {
    auto f = r.free_symbols();
    syms.insert(f.begin(), f.end());
  }
  out.symbolic = false;
  out.max_numeric = max_abs_residual(flat, sample_points(syms, 64, 42));
  out.integral = out.max_numeric <= 1e-9;
  return out;
}

/// Parts of a vertical vector under the splitting VY = VY_Sigma + Y x_Sigma VSigma:
///   y'^i d_i + s'^m d_m = (y'^i - A^i_m s'^m) d_i + s'^m (d_m + A^i_m d_i).
struct VerticalSplit {
  std::vector<Expr> fibre_part;    // components along d_i of the VY_Sigma summand
  std::vector<Expr> sigma_part;    // s'^m of the second summand
  std::vector<Expr> lifted_fibre;  // A^i_m s'^m, its d_i components
};

inline VerticalSplit vertical_splitting_project(const SigmaConnection& as, const std::vector<Expr>& ydot,
                                                const std::vector<Expr>& sdot) {
  as.validate();
  if (ydot.size() != as.chart.fibre().size() || sdot.size() != as.chart.middle().size())
    throw ChartMismatch("vertical vector has the wrong number of components");
  VerticalSplit out{{}, sdot, {}};
  for (std::size_t i = 0; i < ydot.size(); ++i) {
    Expr lift;
    for (std::size_t m = 0; m < sdot.size(); ++m) lift += as.a[i][m] * sdot[m];
    out.lifted_fibre.push_back(lift);
    out.fibre_part.push_back(ydot[i] - lift);
  }
  return out;
}

/// Parts of a vertical covector under the dual splitting:
///   y'_i dy^i + s'_m ds^m = y'_i (dy^i - A^i_m ds^m) + (s'_m + A^i_m y'_i) ds^m.
struct CoverticalSplit {
  std::vector<Expr> fibre_part;  // coefficients of (dy^i - A^i_m ds^m)
  std::vector<Expr> sigma_part;  // coefficients of ds^m
};

inline CoverticalSplit covertical_splitting_project(const SigmaConnection& as, const std::vector<Expr>& ydot,
                                                    const std::vector<Expr>& sdot) {
  as.validate();
  if (ydot.size() != as.chart.fibre().size() || sdot.size() != as.chart.middle().size())
    throw ChartMismatch("vertical covector has the wrong number of components");
  CoverticalSplit out{ydot, {}};
  for (std::size_t m = 0; m < sdot.size(); ++m) {
    Expr c = sdot[m];
    for (std::size_t i = 0; i < ydot.size(); ++i) c += as.a[i][m] * ydot[i];
    out.sigma_part.push_back(c);
  }
  return out;
}

/// omega ^ A_Sigma = omega ^ ds^m (x) (d_m + A^i_m d_i) over the Y coordinates.
inline TangentValuedForm characterizing_form(const SigmaConnection& as) {
  as.validate();
  const auto& chart = as.chart;
  const Coordinates coords(chart.y_coords());
  const Form omega = Form::product(coords, chart.base());
  TangentValuedForm out(coords, static_cast<int>(chart.base().size()) + 1);
  for (std::size_t m = 0; m < chart.middle().size(); ++m) {
    const Form w = wedge(omega, Form::differential(coords, chart.middle()[m]));
    out.add(chart.middle()[m], w);
    for (std::size_t i = 0; i < chart.fibre().size(); ++i) out.add(chart.fibre()[i], as.a[i][m] * w);
  }
  return out;
}

/// D~ = dx^l (x) (y^i_l - A~^i_l - A^i_m s^m_l) d_i at the J1Y point p; result[i][l].
inline ExprMatrix vertical_covariant_differential(const SigmaConnection& as, const JetPoint& p) {
  as.validate();
  validate(as.chart, p);
  if (p.kind != JetKind::J1Y) throw ChartMismatch("vertical covariant differential acts on J1Y");
  const auto& chart = as.chart;
  auto out = zero_matrix(chart.fibre().size(), chart.base().size());
  for (std::size_t i = 0; i < chart.fibre().size(); ++i)
    for (std::size_t l = 0; l < chart.base().size(); ++l) {
      const auto& x = chart.base()[l];
      Expr d = p[velocity_name(chart.fibre()[i], x)] - as.tilde[i][l].subst(p.values);
      for (std::size_t m = 0; m < chart.middle().size(); ++m)
        d -= as.a[i][m].subst(p.values) * p[velocity_name(chart.middle()[m], x)];
      out[i][l] = d;
    }
  return out;
}

/// pr_1 o D_A for the composite connection A of (A_Sigma, Gamma):
///   y^i_l - A^i_l - A^i_m (s^m_l - Gamma^m_l),
/// with A^i_l the composite y-coefficient. Equal to the vertical covariant
/// differential for every Gamma.
inline ExprMatrix projected_covariant_differential(const SigmaConnection& as, const Connection& g,
                                                   const JetPoint& p) {
  const Connection a = composite_connection(as, g);
  const auto& chart = as.chart;
  const std::size_t k = chart.middle().size();
  auto out = zero_matrix(chart.fibre().size(), chart.base().size());
  for (std::size_t i = 0; i < chart.fibre().size(); ++i)
    for (std::size_t l = 0; l < chart.base().size(); ++l) {
      const auto& x = chart.base()[l];
      Expr d = p[velocity_name(chart.fibre()[i], x)] - a.coef[k + i][l].subst(p.values);
      for (std::size_t m = 0; m < k; ++m)
        d -= as.a[i][m].subst(p.values) *
             (p[velocity_name(chart.middle()[m], x)] - g.coef[m][l].subst(p.values));
      out[i][l] = d;
    }
  return out;
}

struct LinearConnection {
  std::vector<std::string> base;
  std::vector<std::string> middle;
  std::vector<std::string> fibre;
  ExprMatrix gamma;            // Gamma^m_l(x, s), [m][l]
  std::vector<ExprMatrix> a;   // A^i_{jl}(x, s), a[l][i][j]

  static LinearConnection zero(std::vector<std::string> base, std::vector<std::string> middle,
                               std::vector<std::string> fibre) {
    LinearConnection c{std::move(base), std::move(middle), std::move(fibre), {}, {}};
    c.gamma = zero_matrix(c.middle.size(), c.base.size());
    c.a.assign(c.base.size(), zero_matrix(c.fibre.size(), c.fibre.size()));
    return c;
  }

  std::vector<std::string> domain() const {
    auto d = base;
    d.insert(d.end(), middle.begin(), middle.end());
    return d;
  }

  /// Validates shapes and that no coefficient depends on the fibre.
  void validate() const {
    if (gamma.size() != middle.size() || a.size() != base.size())
      throw ChartMismatch("linear connection shape mismatch");
    for (const auto& m : a)
      if (m.size() != fibre.size()) throw ChartMismatch("linear connection shape mismatch");
    detail::require_matrix_symbols(gamma, domain());
    for (const auto& m : a) detail::require_matrix_symbols(m, domain());
  }

  /// Fibre coefficient sum_j A^i_{jl} y^j.
  Expr fibre_coefficient(std::size_t i, std::size_t l) const {
    Expr c;
    for (std::size_t j = 0; j < fibre.size(); ++j) c += a[l][i][j] * Expr::symbol(fibre[j]);
    return c;
  }
};

/// General connection on Y -> X with the LinearConnection's chart.
inline Connection as_connection(const LinearConnection& c) {
  c.validate();
  std::vector<std::string> vertical = c.middle;
  vertical.insert(vertical.end(), c.fibre.begin(), c.fibre.end());
  std::vector<std::string> domain = c.domain();
  domain.insert(domain.end(), c.fibre.begin(), c.fibre.end());
  Connection out = Connection::zero(c.base, vertical, domain);
  for (std::size_t m = 0; m < c.middle.size(); ++m) out.coef[m] = c.gamma[m];
  for (std::size_t i = 0; i < c.fibre.size(); ++i)
    for (std::size_t l = 0; l < c.base.size(); ++l) out.coef[c.middle.size() + i][l] = c.fibre_coefficient(i, l);
  return out;
}

/// Recovers the linear form of a connection on Y -> X whose fibre coefficients
/// are linear in the fibre coordinates. Throws Error for non-linear input.
inline LinearConnection to_linear(const Connection& g, const std::vector<std::string>& middle,
                                  const std::vector<std::string>& fibre) {
  g.validate();
  LinearConnection out = LinearConnection::zero(g.base, middle, fibre);
  Substitution zero_fibre;
  for (const auto& y : fibre) zero_fibre[y] = Expr(0);
  for (std::size_t m = 0; m < middle.size(); ++m) {
    for (std::size_t l = 0; l < g.base.size(); ++l) {
      const Expr& c = g.at(middle[m], g.base[l]);
      for (const auto& y : fibre)
        if (c.depends_on(y)) throw Error("non-linear input: base projection depends on the fibre");
      out.gamma[m][l] = c;
    }
  }
  for (std::size_t i = 0; i < fibre.size(); ++i)
    for (std::size_t l = 0; l < g.base.size(); ++l) {
      const Expr& c = g.at(fibre[i], g.base[l]);
      Expr rebuilt;
      for (std::size_t j = 0; j < fibre.size(); ++j) {
        const Expr aij = c.diff(fibre[j]);
        for (const auto& y : fibre)
          if (aij.depends_on(y)) throw Error("non-linear input: coefficient is not linear in the fibre");
        out.a[l][i][j] = aij;
        rebuilt += aij * Expr::symbol(fibre[j]);
      }
      if (rebuilt != c) throw Error("non-linear input: coefficient has a fibre-independent part");
    }
  out.validate();
  return out;
}

inline std::vector<std::string> dual_names(const std::vector<std::string>& fibre) {
  std::vector<std::string> out;
  for (const auto& y : fibre) out.push_back(y + "_dual");
  return out;
}

/// A* = dx^l (x) (d_l + Gamma^m_l d_m - A^j_{il} y_j d^i) on the dual bundle.
inline LinearConnection dual_connection(const LinearConnection& c, std::vector<std::string> names = {}) {
  c.validate();
  if (names.empty()) names = dual_names(c.fibre);
  if (names.size() != c.fibre.size()) throw ChartMismatch("dual fibre name count mismatch");
  LinearConnection out = LinearConnection::zero(c.base, c.middle, std::move(names));
  out.gamma = c.gamma;
  for (std::size_t l = 0; l < c.base.size(); ++l)
    for (std::size_t i = 0; i < c.fibre.size(); ++i)
      for (std::size_t j = 0; j < c.fibre.size(); ++j) out.a[l][i][j] = -c.a[l][j][i];
  return out;
}

/// Horizontal derivative of the pairing <y, y*> = y^i y_i along A x A*:
/// e_l(<y, y*>) for each base direction. Identically zero for the dual.
inline std::vector<Expr> pairing_derivative(const LinearConnection& a, const LinearConnection& dual) {
  a.validate();
  dual.validate();
  if (a.base != dual.base || a.middle != dual.middle || !detail::matrices_equal(a.gamma, dual.gamma))
    throw ChartMismatch("connections are not over the same Gamma");
  Expr pairing;
  for (std::size_t i = 0; i < a.fibre.size(); ++i)
    pairing += Expr::symbol(a.fibre[i]) * Expr::symbol(dual.fibre[i]);
  std::vector<Expr> out;
  for (std::size_t l = 0; l < a.base.size(); ++l) {
    VectorField e;
    e.components[a.base[l]] = Expr(1);
    for (std::size_t m = 0; m < a.middle.size(); ++m) e.components[a.middle[m]] = a.gamma[m][l];
    for (std::size_t i = 0; i < a.fibre.size(); ++i) e.components[a.fibre[i]] = a.fibre_coefficient(i, l);
    for (std::size_t i = 0; i < dual.fibre.size(); ++i)
      e.components[dual.fibre[i]] = dual.fibre_coefficient(i, l);
    out.push_back(e.apply(pairing));
  }
  return out;
}

inline std::string tensor_name(const std::string& y, const std::string& z) { return y + "_" + z; }

/// A (x) A' with coefficients A^i_{jl} y^{jk} + A'^k_{jl} y^{ij} on Y (x)_Sigma Y'.
/// Fibre coordinate y^{ik} is named "<y^i>_<y'^k>", row-major in (i, k).
inline LinearConnection tensor_connection(const LinearConnection& a, const LinearConnection& b) {
  a.validate();
  b.validate();
  if (a.base != b.base || a.middle != b.middle || !detail::matrices_equal(a.gamma, b.gamma))
    throw ChartMismatch("tensor product needs connections over the same Gamma");
  std::vector<std::string> names;
  for (const auto& y : a.fibre)
    for (const auto& z : b.fibre) names.push_back(tensor_name(y, z));
  LinearConnection out = LinearConnection::zero(a.base, a.middle, names);
  out.gamma = a.gamma;
  const std::size_t p = a.fibre.size(), q = b.fibre.size();
  for (std::size_t l = 0; l < a.base.size(); ++l)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < q; ++k)
        for (std::size_t j = 0; j < p; ++j)
          for (std::size_t r = 0; r < q; ++r) {
            Expr c;
            if (r == k) c += a.a[l][i][j];
            if (j == i) c += b.a[l][k][r];
            out.a[l][i * q + k][j * q + r] = c;
          }
  return out;
}

/// Tensor coefficient at y^{ik} = u^i v^k minus (A u)^i v^k + u^i (A' v)^k,
/// for each (l, i, k). Zero by the Leibniz rule.
inline std::vector<Expr> tensor_leibniz_residual(const LinearConnection& a, const LinearConnection& b,
                                                 const std::vector<Expr>& u, const std::vector<Expr>& v) {
  const LinearConnection t = tensor_connection(a, b);
  const std::size_t p = a.fibre.size(), q = b.fibre.size();
  if (u.size() != p || v.size() != q) throw ChartMismatch("decomposable factors have the wrong size");
  Substitution decomposable;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t k = 0; k < q; ++k) decomposable[t.fibre[i * q + k]] = u[i] * v[k];
  std::vector<Expr> out;
  for (std::size_t l = 0; l < a.base.size(); ++l)
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t k = 0; k < q; ++k) {
        Expr au, bv;
        for (std::size_t j = 0; j < p; ++j) au += a.a[l][i][j] * u[j];
        for (std::size_t r = 0; r < q; ++r) bv += b.a[l][k][r] * v[r];
        out.push_back(t.fibre_coefficient(i * q + k, l).subst(decomposable) - (au * v[k] + u[i] * bv));
      }
  return out;
}

inline std::vector<std::string> dot_names(const std::vector<std::string>& fibre) {
  std::vector<std::string> out;
  for (const auto& y : fibre) out.push_back(y + "_dot");
  return out;
}

/// VGamma = dx^l (x) (d_l + Gamma^i_l d/dy^i + d_j Gamma^i_l y'^j d/dy'^i) on VY -> Y -> X.
inline LinearConnection vertical_lift(const Connection& g) {
  g.validate();
  LinearConnection out = LinearConnection::zero(g.base, g.vertical, dot_names(g.vertical));
  out.gamma = g.coef;
  for (std::size_t l = 0; l < g.base.size(); ++l)
    for (std::size_t i = 0; i < g.vertical.size(); ++i)
      for (std::size_t j = 0; j < g.vertical.size(); ++j)
        out.a[l][i][j] = g.coef[i][l].diff(g.vertical[j]);
  return out;
}

/// V*Gamma = dx^l (x) (d_l + Gamma^i_l d/dy^i - d_j Gamma^i_l y'_i d/dy'_j) on V*Y -> Y -> X.
inline LinearConnection vertical_colift(const Connection& g) {
  g.validate();
  LinearConnection out = LinearConnection::zero(g.base, g.vertical, dual_names(dot_names(g.vertical)));
  out.gamma = g.coef;
  for (std::size_t l = 0; l < g.base.size(); ++l)
    for (std::size_t j = 0; j < g.vertical.size(); ++j)      // row: component along d/dy'_j
      for (std::size_t i = 0; i < g.vertical.size(); ++i)    // column: multiplies y'_i
        out.a[l][j][i] = -g.coef[i][l].diff(g.vertical[j]);
  return out;
}

inline bool operator==(const LinearConnection& a, const LinearConnection& b) {
  if (a.base != b.base || a.middle != b.middle || a.fibre != b.fibre) return false;
  if (!detail::matrices_equal(a.gamma, b.gamma)) return false;
  for (std::size_t l = 0; l < a.a.size(); ++l)
    if (!detail::matrices_equal(a.a[l], b.a[l])) return false;
  return true;
}

/// Symmetric linear connection K^m_{nl}(x) on TX; k[m][n][l].
struct SymmetricConnection {
  std::vector<std::string> base;
  std::vector<ExprMatrix> k;

  static SymmetricConnection zero(std::vector<std::string> base) {
    SymmetricConnection c{std::move(base), {}};
    c.k.assign(c.base.size(), zero_matrix(c.base.size(), c.base.size()));
    return c;
  }

  const Expr& at(std::size_t mu, std::size_t nu, std::size_t lambda) const { return k[mu][nu][lambda]; }

  /// Sets K^m_{nl} and K^m_{ln} together.
  void set(std::size_t mu, std::size_t nu, std::size_t lambda, const Expr& v) {
    k[mu][nu][lambda] = v;
    k[mu][lambda][nu] = v;
  }

  void validate() const {
    const std::size_t n = base.size();
    if (k.size() != n) throw ChartMismatch("symmetric connection shape mismatch");
    for (std::size_t m = 0; m < n; ++m) {
      if (k[m].size() != n) throw ChartMismatch("symmetric connection shape mismatch");
      detail::require_matrix_symbols(k[m], base);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
          if (k[m][a][b] != k[m][b][a]) throw Error("connection K is not symmetric in its lower indices");
    }
  }
};

}  // namespace jetcalc
