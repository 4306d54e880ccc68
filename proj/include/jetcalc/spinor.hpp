#pragma once

// Dirac spinors over a four-dimensional world: the Clifford model
// (eta = diag(+1,-1,-1,-1), Dirac basis), tetrads and gamma_h, the Dirac
// operator on S_h, spin connection coefficients on the composite spinor
// bundle S -> Sigma -> X with Sigma the tetrad bundle, the Levi-Civita
// reduction and the total Dirac operator.
//
// Index conventions: tetrad h[lambda][a] = h^lambda_a (world index first),
// its inverse [a][lambda]; spin coefficients A^{ab} are summed over all
// ordered pairs (a, b).

#include <array>
#include <map>
#include <string>
#include <vector>

#include "jetcalc/connection.hpp"
#include "jetcalc/error.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/linalg.hpp"
#include "jetcalc/rational.hpp"

namespace jetcalc {

/// re + i im with real Expr parts.
struct CExpr {
  Expr re, im;

  CExpr() = default;
  CExpr(Expr r, Expr i = Expr()) : re(std::move(r)), im(std::move(i)) {}  // NOLINT

  bool is_zero() const { return re.is_zero() && im.is_zero(); }

  friend CExpr operator+(const CExpr& a, const CExpr& b) { return {a.re + b.re, a.im + b.im}; }
  friend CExpr operator-(const CExpr& a, const CExpr& b) { return {a.re - b.re, a.im - b.im}; }
  friend CExpr operator-(const CExpr& a) { return {-a.re, -a.im}; }
  friend CExpr operator*(const CExpr& a, const CExpr& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend CExpr operator*(const GaussianRational& g, const CExpr& a) {
    if (g.im == 0) return {Expr(g.re) * a.re, Expr(g.re) * a.im};
    if (g.re == 0) return {-(Expr(g.im) * a.im), Expr(g.im) * a.re};
    return {Expr(g.re) * a.re - Expr(g.im) * a.im, Expr(g.re) * a.im + Expr(g.im) * a.re};
  }
  CExpr& operator+=(const CExpr& o) { return *this = *this + o; }
  CExpr& operator-=(const CExpr& o) { return *this = *this - o; }
  friend bool operator==(const CExpr& a, const CExpr& b) { return a.re == b.re && a.im == b.im; }

  CExpr subst(const std::map<std::string, Expr>& m) const { return {re.subst(m), im.subst(m)}; }
  CExpr diff(const std::string& name) const { return {re.diff(name), im.diff(name)}; }

  std::string str() const {
    if (im.is_zero()) return re.str();
    const std::string i = im.is_polynomial() && im.num().size() == 1 ? im.str() : "(" + im.str() + ")";
    if (re.is_zero()) return i + "*i";
    return re.str() + " + " + i + "*i";
  }
};

/// Reads a complex value written linearly in the symbol i, e.g. "x + 2*y*i".
inline CExpr parse_complex(std::string_view text) {
  const Expr e = parse_expr(text);
  const Expr im = e.diff("i");
  if (im.depends_on("i")) throw Error("complex value must be linear in i");
  const Expr re = e.subst({{"i", Expr(0)}});
  return {re, im};
}

using GammaMatrix = std::array<std::array<GaussianRational, 4>, 4>;
using Spinor = std::array<CExpr, 4>;

inline GammaMatrix gamma_mul(const GammaMatrix& a, const GammaMatrix& b) {
  GammaMatrix out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) out[i][j] = out[i][j] + a[i][k] * b[k][j];
  return out;
}
inline GammaMatrix gamma_add(const GammaMatrix& a, const GammaMatrix& b, const GaussianRational& s = 1) {
  GammaMatrix out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = a[i][j] + s * b[i][j];
  return out;
}
inline GammaMatrix gamma_scale(const GaussianRational& s, const GammaMatrix& a) {
  GammaMatrix out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = s * a[i][j];
  return out;
}
inline GammaMatrix gamma_identity() {
  GammaMatrix out{};
  for (int i = 0; i < 4; ++i) out[i][i] = 1;
  return out;
}
inline GammaMatrix commutator(const GammaMatrix& a, const GammaMatrix& b) {
  return gamma_add(gamma_mul(a, b), gamma_mul(b, a), -1);
}
inline Spinor gamma_apply(const GammaMatrix& m, const Spinor& v) {
  Spinor out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (!m[i][j].is_zero() && !v[j].is_zero()) out[i] += m[i][j] * v[j];
  return out;
}

struct CliffordModel {
  std::array<int, 4> eta;                 // diagonal of eta_{ab} = eta^{ab}
  std::array<GammaMatrix, 4> gamma;       // gamma^a
  std::array<GammaMatrix, 4> gamma_lower; // gamma_a = eta_{ab} gamma^b
  std::array<std::array<GammaMatrix, 4>, 4> generator;  // I_ab = 1/4 [gamma_a, gamma_b]
};

/// Dirac basis for eta = diag(+1,-1,-1,-1): gamma^0 = diag(1,1,-1,-1),
/// gamma^k = [[0, s_k], [-s_k, 0]] with Pauli s_k.
inline CliffordModel build_clifford(std::array<int, 4> signature = {1, -1, -1, -1}) {
  if (signature != std::array<int, 4>{1, -1, -1, -1})
    throw Error("unsupported signature: only (+,-,-,-) is modeled");
  CliffordModel m{};
  m.eta = signature;
  const GaussianRational i = GaussianRational::i();
  const std::array<std::array<std::array<GaussianRational, 2>, 2>, 3> pauli = {{
      {{{0, 1}, {1, 0}}},
      {{{0, -i}, {i, 0}}},
      {{{1, 0}, {0, -1}}},
  }};
  m.gamma[0] = GammaMatrix{};
  m.gamma[0][0][0] = m.gamma[0][1][1] = 1;
  m.gamma[0][2][2] = m.gamma[0][3][3] = -1;
  for (int k = 0; k < 3; ++k) {
    GammaMatrix g{};
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) {
        g[r][c + 2] = pauli[k][r][c];
        g[r + 2][c] = -pauli[k][r][c];
      }
    m.gamma[k + 1] = g;
  }
  for (int a = 0; a < 4; ++a) m.gamma_lower[a] = gamma_scale(m.eta[a], m.gamma[a]);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      m.generator[a][b] = gamma_scale(GaussianRational(Rational(1, 4), 0),
                                      commutator(m.gamma_lower[a], m.gamma_lower[b]));
  return m;
}

/// Number of failing entries among gamma^a gamma^b + gamma^b gamma^a = 2 eta^{ab} Id.
inline int clifford_relation_failures(const CliffordModel& m) {
  int bad = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const GammaMatrix lhs = gamma_add(gamma_mul(m.gamma[a], m.gamma[b]), gamma_mul(m.gamma[b], m.gamma[a]));
      const GammaMatrix rhs = gamma_scale(a == b ? 2 * m.eta[a] : 0, gamma_identity());
      if (lhs != rhs) ++bad;
    }
  return bad;
}

/// Number of failing triples (a < b, c) of [I_ab, gamma_c] = eta_bc gamma_a - eta_ac gamma_b.
inline int lorentz_action_failures(const CliffordModel& m) {
  int bad = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        const GammaMatrix lhs = commutator(m.generator[a][b], m.gamma_lower[c]);
        const GammaMatrix rhs = gamma_add(gamma_scale(b == c ? m.eta[b] : 0, m.gamma_lower[a]),
                                          gamma_scale(a == c ? m.eta[a] : 0, m.gamma_lower[b]), -1);
        if (lhs != rhs) ++bad;
      }
  return bad;
}

/// h^lambda_a(x) over a four-dimensional base.
struct Tetrad {
  std::vector<std::string> base;
  ExprMatrix h;  // h[lambda][a]

  static Tetrad identity(std::vector<std::string> base) {
    const std::size_t n = base.size();
    return Tetrad{std::move(base), identity_matrix(n)};
  }

  void validate() const {
    if (base.size() != 4 || h.size() != 4) throw ChartMismatch("tetrads live on a four-dimensional base");
    for (const auto& row : h)
      if (row.size() != 4) throw ChartMismatch("tetrad must be 4x4");
    detail::require_matrix_symbols(h, base);
  }

  /// h^a_lambda, [a][lambda]. Throws DomainError for a singular tetrad.
  ExprMatrix inverse() const {
    validate();
    try {
      return jetcalc::inverse(h);
    } catch (const DomainError&) {
      throw DomainError("singular tetrad");
    }
  }
};

using ComplexMatrix = std::array<std::array<CExpr, 4>, 4>;

/// gamma_h(dx^lambda) = h^lambda_a gamma^a.
inline ComplexMatrix gamma_h(const CliffordModel& m, const Tetrad& t, std::size_t lambda) {
  t.validate();
  if (lambda >= 4) throw UnknownCoordinate("dx^" + std::to_string(lambda));
  if (determinant(t.h).is_zero()) throw DomainError("singular tetrad");
  ComplexMatrix out;
  for (int a = 0; a < 4; ++a) {
    const CExpr coef(t.h[lambda][a]);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        if (!m.gamma[a][r][c].is_zero()) out[r][c] += m.gamma[a][r][c] * coef;
  }
  return out;
}

inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < 4; ++j)
        if (!b[k][j].is_zero()) out[i][j] += a[i][k] * b[k][j];
    }
  return out;
}

/// {gamma_h(dx^l), gamma_h(dx^m)} - 2 h^l_a h^m_b eta^{ab} Id, entrywise.
inline ComplexMatrix induced_metric_residual(const CliffordModel& m, const Tetrad& t, std::size_t l, std::size_t mu) {
  const ComplexMatrix gl = gamma_h(m, t, l), gm = gamma_h(m, t, mu);
  const ComplexMatrix p = matmul(gl, gm), q = matmul(gm, gl);
  Expr g;
  for (int a = 0; a < 4; ++a) g += Expr(m.eta[a]) * t.h[l][a] * t.h[mu][a];
  ComplexMatrix out;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) out[i][j] = p[i][j] + q[i][j] - CExpr(i == j ? Expr(2) * g : Expr());
  return out;
}

/// Spinor y^A and its jets y^A_lambda.
struct SpinorJet {
  Spinor y;
  std::vector<Spinor> dy;  // dy[lambda]
};

/// y^A = yr<A> + i yi<A>, y^A_lambda = yr<A>_<x> + i yi<A>_<x>.
inline SpinorJet symbolic_spinor_jet(const std::vector<std::string>& base) {
  SpinorJet j;
  j.dy.resize(base.size());
  for (int a = 0; a < 4; ++a) {
    const std::string r = "yr" + std::to_string(a), i = "yi" + std::to_string(a);
    j.y[a] = CExpr(Expr::symbol(r), Expr::symbol(i));
    for (std::size_t l = 0; l < base.size(); ++l)
      j.dy[l][a] = CExpr(Expr::symbol(velocity_name(r, base[l])), Expr::symbol(velocity_name(i, base[l])));
  }
  return j;
}

/// Jet prolongation of a spinor field y^A(x).
inline SpinorJet prolong_spinor(const std::vector<std::string>& base, const Spinor& field) {
  SpinorJet j{field, std::vector<Spinor>(base.size())};
  for (std::size_t l = 0; l < base.size(); ++l)
    for (int a = 0; a < 4; ++a) j.dy[l][a] = field[a].diff(base[l]);
  return j;
}

/// Coefficients A^{ab}_lambda, indexed [lambda][a][b].
using SpinCoefficients = std::vector<ExprMatrix>;

inline SpinCoefficients zero_spin_coefficients(std::size_t n) { return SpinCoefficients(n, zero_matrix(4, 4)); }

/// sum_{ab} c^{ab} I_ab y.
inline Spinor generator_action(const CliffordModel& m, const ExprMatrix& c, const Spinor& y) {
  Spinor out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b || c[a][b].is_zero()) continue;
      const Spinor iy = gamma_apply(m.generator[a][b], y);
      for (int r = 0; r < 4; ++r) out[r] += CExpr(c[a][b]) * iy[r];
    }
  return out;
}

/// D_h^A = h^l_a gamma^{aA}_B (y^B_l - A^{ab}_l I_ab^B_C y^C).
inline Spinor dirac_operator(const CliffordModel& m, const Tetrad& t, const SpinCoefficients& coef,
                             const SpinorJet& jet) {
  t.validate();
  if (determinant(t.h).is_zero()) throw DomainError("singular tetrad");
  if (coef.size() != 4 || jet.dy.size() != 4) throw ChartMismatch("spinor jet must have four base directions");
  Spinor out;
  for (std::size_t l = 0; l < 4; ++l) {
    const Spinor ay = generator_action(m, coef[l], jet.y);
    Spinor d;
    for (int r = 0; r < 4; ++r) d[r] = jet.dy[l][r] - ay[r];
    for (int a = 0; a < 4; ++a) {
      if (t.h[l][a].is_zero()) continue;
      const Spinor gd = gamma_apply(m.gamma[a], d);
      for (int r = 0; r < 4; ++r) out[r] += CExpr(t.h[l][a]) * gd[r];
    }
  }
  return out;
}

/// Composite spinor coordinates: sigma^mu_a = "s<mu><a>", sigma^mu_{a lambda} = "s<mu><a>_<x>".
inline std::string frame_name(std::size_t mu, std::size_t a) { return "s" + std::to_string(mu) + std::to_string(a); }

/// A point of J1 of the tetrad bundle: sigma[mu][a] and its jets dsigma[lambda][mu][a].
struct FramePoint {
  std::vector<std::string> base;
  ExprMatrix sigma;
  std::vector<ExprMatrix> dsigma;

  static FramePoint symbolic(std::vector<std::string> base) {
    FramePoint p{std::move(base), zero_matrix(4, 4), {}};
    p.dsigma.assign(4, zero_matrix(4, 4));
    for (std::size_t mu = 0; mu < 4; ++mu)
      for (std::size_t a = 0; a < 4; ++a) {
        p.sigma[mu][a] = Expr::symbol(frame_name(mu, a));
        for (std::size_t l = 0; l < 4; ++l)
          p.dsigma[l][mu][a] = Expr::symbol(velocity_name(frame_name(mu, a), p.base[l]));
      }
    return p;
  }

  /// sigma pinned to h(x), its jets to d_lambda h.
  static FramePoint pinned(const Tetrad& t) {
    t.validate();
    FramePoint p{t.base, t.h, {}};
    p.dsigma.assign(4, zero_matrix(4, 4));
    for (std::size_t l = 0; l < 4; ++l)
      for (std::size_t mu = 0; mu < 4; ++mu)
        for (std::size_t a = 0; a < 4; ++a) p.dsigma[l][mu][a] = t.h[mu][a].diff(t.base[l]);
    return p;
  }

  /// Substitution s<mu><a> -> sigma[mu][a], s<mu><a>_<x> -> dsigma.
  Substitution as_substitution() const {
    Substitution s;
    for (std::size_t mu = 0; mu < 4; ++mu)
      for (std::size_t a = 0; a < 4; ++a) {
        s[frame_name(mu, a)] = sigma[mu][a];
        for (std::size_t l = 0; l < 4; ++l) s[velocity_name(frame_name(mu, a), base[l])] = dsigma[l][mu][a];
      }
    return s;
  }
};

/// Spin connection on the tetrad bundle: A~^{ab}_mu [mu][a][b] and A^{ab c}_mu [mu][c][a][b].
struct SpinConnection {
  SpinCoefficients tilde;
  std::vector<std::vector<ExprMatrix>> frame;

  SpinConnection subst(const Substitution& s) const {
    SpinConnection out = *this;
    for (auto& m : out.tilde) m = jetcalc::subst(m, s);
    for (auto& row : out.frame)
      for (auto& m : row) m = jetcalc::subst(m, s);
    return out;
  }
};

/// A^{ab c}_mu = 1/2 (eta^{cb} s^a_mu - eta^{ca} s^b_mu) with s^a_mu the inverse frame.
inline std::vector<std::vector<ExprMatrix>> frame_coefficients(const CliffordModel& m, const ExprMatrix& inv) {
  const Expr half(Rational(1, 2));
  std::vector<std::vector<ExprMatrix>> out(4, std::vector<ExprMatrix>(4, zero_matrix(4, 4)));
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
          Expr v;
          if (c == b) v += Expr(m.eta[c]) * inv[a][mu];
          if (c == a) v -= Expr(m.eta[c]) * inv[b][mu];
          out[mu][c][a][b] = half * v;
        }
  return out;
}

/// A~^{ab}_mu = 1/2 K^nu_{lambda mu} sigma^lambda_c (eta^{cb} s^a_nu - eta^{ca} s^b_nu).
inline SpinCoefficients tilde_coefficients(const CliffordModel& m, const SymmetricConnection& k,
                                           const ExprMatrix& sigma, const ExprMatrix& inv) {
  const Expr half(Rational(1, 2));
  SpinCoefficients out = zero_spin_coefficients(4);
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t nu = 0; nu < 4; ++nu)
      for (std::size_t lam = 0; lam < 4; ++lam) {
        const Expr& knl = k.at(nu, lam, mu);
        if (knl.is_zero()) continue;
        for (std::size_t a = 0; a < 4; ++a)
          for (std::size_t b = 0; b < 4; ++b) {
            if (a == b) continue;
            const Expr v = Expr(m.eta[b]) * sigma[lam][b] * inv[a][nu] - Expr(m.eta[a]) * sigma[lam][a] * inv[b][nu];
            if (!v.is_zero()) out[mu][a][b] += half * knl * v;
          }
      }
  return out;
}

/// Coefficients of the spin connection at the frame sigma. Throws DomainError for singular sigma.
inline SpinConnection spin_connection_coeffs(const CliffordModel& m, const SymmetricConnection& k,
                                             const ExprMatrix& sigma) {
  k.validate();
  if (k.base.size() != 4) throw ChartMismatch("spin connection needs a four-dimensional base");
  ExprMatrix inv;
  try {
    inv = inverse(sigma);
  } catch (const DomainError&) {
    throw DomainError("singular frame sigma");
  }
  return SpinConnection{tilde_coefficients(m, k, sigma, inv), frame_coefficients(m, inv)};
}

/// A_h^{ab}_mu = A~^{ab}_mu + A^{ab c}_nu d_mu h^nu_c at sigma = h.
inline SpinCoefficients reduce_spin_connection(const SpinConnection& pinned, const Tetrad& t) {
  SpinCoefficients out = pinned.tilde;
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t nu = 0; nu < 4; ++nu)
      for (std::size_t c = 0; c < 4; ++c) {
        const Expr dh = t.h[nu][c].diff(t.base[mu]);
        if (dh.is_zero()) continue;
        for (std::size_t a = 0; a < 4; ++a)
          for (std::size_t b = 0; b < 4; ++b)
            if (!pinned.frame[nu][c][a][b].is_zero()) out[mu][a][b] += pinned.frame[nu][c][a][b] * dh;
      }
  return out;
}

/// Levi-Civita reduction, written out directly:
///   1/2 (K^nu_{lambda mu} h^lambda_c + d_mu h^nu_c)(eta^{cb} h^a_nu - eta^{ca} h^b_nu).
inline SpinCoefficients levi_civita_reduction(const CliffordModel& m, const SymmetricConnection& k, const Tetrad& t) {
  k.validate();
  const ExprMatrix inv = t.inverse();
  const Expr half(Rational(1, 2));
  SpinCoefficients out = zero_spin_coefficients(4);
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t nu = 0; nu < 4; ++nu)
      for (std::size_t c = 0; c < 4; ++c) {
        Expr w = t.h[nu][c].diff(t.base[mu]);
        for (std::size_t lam = 0; lam < 4; ++lam) w += k.at(nu, lam, mu) * t.h[lam][c];
        if (w.is_zero()) continue;
        w = half * Expr(m.eta[c]) * w;
        for (std::size_t a = 0; a < 4; ++a)
          for (std::size_t b = 0; b < 4; ++b) {
            Expr v;
            if (b == c) v += inv[a][nu];
            if (a == c) v -= inv[b][nu];
            if (!v.is_zero()) out[mu][a][b] += w * v;
          }
      }
  return out;
}

/// D^A = s^l_a gamma^{aA}_B (y^B_l - A~^B_l - A^{B c}_mu s^mu_{c l}) with the
/// spinor coefficients A~^B_l = 1/2 A~^{ab}_l I_ab y, A^{B c}_mu = 1/2 A^{ab c}_mu I_ab y.
/// `conn` must be evaluated at the frame of `frame`.
inline Spinor total_dirac(const CliffordModel& m, const SpinConnection& conn, const FramePoint& frame,
                          const SpinorJet& jet) {
  if (frame.base.size() != 4 || jet.dy.size() != 4) throw ChartMismatch("composite spinor chart needs four base directions");
  if (determinant(frame.sigma).is_zero()) throw DomainError("singular frame sigma");
  const Expr half(Rational(1, 2));
  auto halve = [&](const ExprMatrix& c) {
    ExprMatrix out = c;
    for (auto& row : out)
      for (auto& e : row) e = half * e;
    return out;
  };
  std::vector<std::vector<Spinor>> frame_part(4, std::vector<Spinor>(4));  // [mu][c]
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t c = 0; c < 4; ++c) frame_part[mu][c] = generator_action(m, halve(conn.frame[mu][c]), jet.y);
  Spinor out;
  for (std::size_t l = 0; l < 4; ++l) {
    const Spinor tl = generator_action(m, halve(conn.tilde[l]), jet.y);
    Spinor d;
    for (int r = 0; r < 4; ++r) d[r] = jet.dy[l][r] - tl[r];
    for (std::size_t mu = 0; mu < 4; ++mu)
      for (std::size_t c = 0; c < 4; ++c) {
        const Expr& ds = frame.dsigma[l][mu][c];
        if (ds.is_zero()) continue;
        for (int r = 0; r < 4; ++r) d[r] -= CExpr(ds) * frame_part[mu][c][r];
      }
    for (int a = 0; a < 4; ++a) {
      if (frame.sigma[l][a].is_zero()) continue;
      const Spinor gd = gamma_apply(m.gamma[a], d);
      for (int r = 0; r < 4; ++r) out[r] += CExpr(frame.sigma[l][a]) * gd[r];
    }
  }
  return out;
}

/// The characterizing form  omega ^ ds^mu_c (x) [d^c_mu + M^c_mu y d],
/// stored as the complex 4x4 matrices M^c_mu, [mu][c].
struct SpinorSplittingForm {
  std::vector<std::vector<ComplexMatrix>> coef;

  /// Fibre components M^c_mu y of the leg along d^c_mu.
  Spinor leg(std::size_t mu, std::size_t c, const Spinor& y) const {
    Spinor out;
    for (int r = 0; r < 4; ++r)
      for (int s = 0; s < 4; ++s)
        if (!coef[mu][c][r][s].is_zero() && !y[s].is_zero()) out[r] += coef[mu][c][r][s] * y[s];
    return out;
  }
};

/// M^c_mu = 1/8 eta^{cb} s^a_mu [gamma_a, gamma_b].
inline SpinorSplittingForm vertical_splitting_form_spinor(const CliffordModel& m, const ExprMatrix& sigma) {
  ExprMatrix inv;
  try {
    inv = inverse(sigma);
  } catch (const DomainError&) {
    throw DomainError("singular frame sigma");
  }
  SpinorSplittingForm out{std::vector<std::vector<ComplexMatrix>>(4, std::vector<ComplexMatrix>(4))};
  const GaussianRational eighth(Rational(1, 8), 0);
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t c = 0; c < 4; ++c)
      for (std::size_t a = 0; a < 4; ++a) {
        if (inv[a][mu].is_zero()) continue;
        const GammaMatrix g = gamma_scale(eighth * GaussianRational(m.eta[c]),
                                          commutator(m.gamma_lower[a], m.gamma_lower[c]));
        for (int r = 0; r < 4; ++r)
          for (int s = 0; s < 4; ++s)
            if (!g[r][s].is_zero()) out.coef[mu][c][r][s] += g[r][s] * CExpr(inv[a][mu]);
      }
  return out;
}

/// The same matrices assembled as 1/2 A^{ab c}_mu I_ab from the frame coefficients.
inline std::vector<std::vector<ComplexMatrix>> splitting_from_generators(const CliffordModel& m,
                                                                         const SpinConnection& conn) {
  std::vector<std::vector<ComplexMatrix>> out(4, std::vector<ComplexMatrix>(4));
  const Expr half(Rational(1, 2));
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t c = 0; c < 4; ++c)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          const Expr& v = conn.frame[mu][c][a][b];
          if (v.is_zero()) continue;
          for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
              if (!m.generator[a][b][r][s].is_zero()) out[mu][c][r][s] += m.generator[a][b][r][s] * CExpr(half * v);
        }
  return out;
}

}  // namespace jetcalc
