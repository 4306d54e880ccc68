#include <gtest/gtest.h>

#include "support.hpp"

using namespace jetcalc;

namespace {

const std::vector<std::string> kBase = {"t", "x", "y", "z"};

Expr P(const char* s) { return parse_expr(s); }

ComplexMatrix lift(const GammaMatrix& g, const Expr& scale = Expr(1)) {
  ComplexMatrix out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c)
      if (!g[r][c].is_zero()) out[r][c] = g[r][c] * CExpr(scale);
  return out;
}

bool all_zero(const Spinor& s) {
  for (const auto& e : s)
    if (!e.is_zero()) return false;
  return true;
}

bool all_zero(const ComplexMatrix& m) {
  for (const auto& row : m)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

GammaMatrix antidiagonal(const GaussianRational& v) {
  GammaMatrix g{};
  for (int r = 0; r < 4; ++r) g[r][3 - r] = v;
  return g;
}

Tetrad diagonal(const char* h00) {
  Tetrad t = Tetrad::identity(kBase);
  t.h[0][0] = P(h00);
  return t;
}

SpinCoefficients halved(SpinCoefficients a) {
  for (auto& m : a)
    for (auto& row : m)
      for (auto& e : row) e = Expr(Rational(1, 2)) * e;
  return a;
}

}  // namespace

TEST(Clifford, Relations) {
  const CliffordModel m = build_clifford();
  EXPECT_EQ(gamma_mul(m.gamma[0], m.gamma[0]), gamma_identity());
  EXPECT_EQ(gamma_mul(m.gamma[1], m.gamma[1]), gamma_scale(-1, gamma_identity()));
  const GammaMatrix anti = gamma_add(gamma_mul(m.gamma[0], m.gamma[1]), gamma_mul(m.gamma[1], m.gamma[0]));
  EXPECT_EQ(anti, GammaMatrix{});
  EXPECT_EQ(clifford_relation_failures(m), 0);
  EXPECT_EQ(lorentz_action_failures(m), 0);
  EXPECT_THROW(build_clifford({1, 1, 1, 1}), Error);
}

TEST(Clifford, GeneratorClosedForm) {
  // I_01 = -1/2 gamma^0 gamma^1 = -1/2 [[0, s1], [s1, 0]]
  const CliffordModel m = build_clifford();
  EXPECT_EQ(m.generator[0][1], antidiagonal(GaussianRational(Rational(-1, 2), 0)));
  EXPECT_EQ(m.generator[1][0], antidiagonal(GaussianRational(Rational(1, 2), 0)));
  for (int a = 0; a < 4; ++a) {
    EXPECT_EQ(m.generator[a][a], GammaMatrix{});
    for (int b = 0; b < 4; ++b) EXPECT_EQ(m.generator[a][b], gamma_scale(-1, m.generator[b][a]));
  }
}

TEST(GammaH, Examples) {
  const CliffordModel m = build_clifford();
  const Tetrad id = Tetrad::identity(kBase);
  for (std::size_t l = 0; l < 4; ++l) EXPECT_EQ(gamma_h(m, id, l), lift(m.gamma[l]));
  EXPECT_EQ(gamma_h(m, diagonal("2"), 0), lift(m.gamma[0], Expr(2)));

  Tetrad singular = id;
  singular.h[1] = singular.h[0];
  EXPECT_THROW(gamma_h(m, singular, 0), DomainError);
  EXPECT_THROW(gamma_h(m, id, 4), UnknownCoordinate);
}

TEST(GammaH, InducedMetric) {
  const CliffordModel m = build_clifford();
  jetcalc::testing::Random rnd(601);
  for (int k = 0; k < 6; ++k) {
    const Tetrad t = rnd.tetrad(kBase, k % 2 == 1);
    for (std::size_t l = 0; l < 4; ++l)
      for (std::size_t mu = l; mu < 4; ++mu) EXPECT_TRUE(all_zero(induced_metric_residual(m, t, l, mu)));
  }
}

TEST(Dirac, FlatVacuumAndSpike) {
  const CliffordModel m = build_clifford();
  const Tetrad id = Tetrad::identity(kBase);
  Spinor constant;
  constant[0] = CExpr(P("1"), P("2"));
  constant[3] = CExpr(P("-5"));
  EXPECT_TRUE(all_zero(dirac_operator(m, id, zero_spin_coefficients(4), prolong_spinor(kBase, constant))));

  for (std::size_t l = 0; l < 4; ++l)
    for (int b = 0; b < 4; ++b) {
      SpinorJet spike{Spinor{}, std::vector<Spinor>(4)};
      spike.dy[l][b] = CExpr(Expr(1));
      const Spinor d = dirac_operator(m, id, zero_spin_coefficients(4), spike);
      for (int r = 0; r < 4; ++r) EXPECT_EQ(d[r], m.gamma[l][r][b] * CExpr(Expr(1))) << l << b << r;
    }
}

TEST(Dirac, PlaneWave) {
  // y = v exp(i k.x) with k = (2, -1, 3, 1/2): D y = i k_l gamma^l y
  const CliffordModel m = build_clifford();
  const std::array<Expr, 4> k = {P("2"), P("-1"), P("3"), P("1/2")};
  const Expr phase = P("2*t - x + 3*y + z/2");
  const CExpr wave(cos(phase), sin(phase));
  const std::array<CExpr, 4> v = {CExpr(P("1"), P("1")), CExpr(P("0")), CExpr(P("-2")), CExpr(P("0"), P("3"))};
  Spinor y;
  for (int a = 0; a < 4; ++a) y[a] = v[a] * wave;
  const Spinor d = dirac_operator(m, Tetrad::identity(kBase), zero_spin_coefficients(4), prolong_spinor(kBase, y));
  Spinor want;
  for (std::size_t l = 0; l < 4; ++l) {
    const Spinor gy = gamma_apply(m.gamma[l], y);
    for (int r = 0; r < 4; ++r) want[r] += CExpr(Expr(), k[l]) * gy[r];
  }
  for (int r = 0; r < 4; ++r) EXPECT_EQ(d[r], want[r]) << r;
}

TEST(SpinConnection, Examples) {
  const CliffordModel m = build_clifford();
  const Tetrad id = Tetrad::identity(kBase);
  const SpinConnection flat = spin_connection_coeffs(m, SymmetricConnection::zero(kBase), id.h);
  for (const auto& mat : flat.tilde)
    for (const auto& row : mat)
      for (const auto& e : row) EXPECT_TRUE(e.is_zero());
  // A^{01 0}_1 = 1/2 (eta^{01} delta^0_1 - eta^{00} delta^1_1)
  EXPECT_EQ(flat.frame[1][0][0][1], Expr(Rational(-1, 2)));
  EXPECT_EQ(flat.frame[1][0][1][0], Expr(Rational(1, 2)));
  EXPECT_TRUE(flat.frame[0][0][0][1].is_zero());

  ExprMatrix singular = id.h;
  singular[2] = singular[3];
  EXPECT_THROW(spin_connection_coeffs(m, SymmetricConnection::zero(kBase), singular), DomainError);
}

TEST(SpinConnection, Antisymmetric) {
  const CliffordModel m = build_clifford();
  jetcalc::testing::Random rnd(602);
  for (int k = 0; k < 4; ++k) {
    const Tetrad t = rnd.tetrad(kBase, true);
    const SpinConnection c = spin_connection_coeffs(m, rnd.symmetric(kBase, 0.8), t.h);
    for (std::size_t mu = 0; mu < 4; ++mu)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) {
          EXPECT_EQ(c.tilde[mu][a][b], -c.tilde[mu][b][a]);
          for (std::size_t cc = 0; cc < 4; ++cc) EXPECT_EQ(c.frame[mu][cc][a][b], -c.frame[mu][cc][b][a]);
        }
  }
}

TEST(LeviCivita, Examples) {
  const CliffordModel m = build_clifford();
  Tetrad constant = Tetrad::identity(kBase);
  constant.h[0][1] = P("3");
  constant.h[2][2] = P("5");
  for (const auto& mat : levi_civita_reduction(m, SymmetricConnection::zero(kBase), constant))
    for (const auto& row : mat)
      for (const auto& e : row) EXPECT_TRUE(e.is_zero());

  // h^0_0 = exp(x): the only derivative d_x h^0_0 pairs with a = b = 0 and drops out
  for (const auto& mat : levi_civita_reduction(m, SymmetricConnection::zero(kBase), diagonal("exp(x)")))
    for (const auto& row : mat)
      for (const auto& e : row) EXPECT_TRUE(e.is_zero());

  // h^t_1 = t: d_t h^t_1 = 1 gives A^{01}_t = 1/2 eta^{11} h^0_t = -1/2
  Tetrad shear = Tetrad::identity(kBase);
  shear.h[0][1] = P("t");
  const SpinCoefficients a = levi_civita_reduction(m, SymmetricConnection::zero(kBase), shear);
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        Expr want;
        if (mu == 0 && i == 0 && j == 1) want = Expr(Rational(-1, 2));
        if (mu == 0 && i == 1 && j == 0) want = Expr(Rational(1, 2));
        EXPECT_EQ(a[mu][i][j], want) << mu << i << j;
      }
}

TEST(LeviCivita, MatchesGenericReduction) {
  const CliffordModel m = build_clifford();
  jetcalc::testing::Random rnd(603);
  for (int k = 0; k < 8; ++k) {
    const Tetrad t = rnd.tetrad(kBase, k % 2 == 1);
    const SymmetricConnection kc = rnd.symmetric(kBase, 0.7);
    const SpinCoefficients direct = levi_civita_reduction(m, kc, t);
    const SpinCoefficients generic = reduce_spin_connection(spin_connection_coeffs(m, kc, t.h), t);
    for (std::size_t mu = 0; mu < 4; ++mu)
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = 0; b < 4; ++b) EXPECT_EQ(direct[mu][a][b], generic[mu][a][b]);
  }
}

TEST(TotalDirac, Examples) {
  const CliffordModel m = build_clifford();
  const SymmetricConnection k0 = SymmetricConnection::zero(kBase);
  const FramePoint id = FramePoint::pinned(Tetrad::identity(kBase));
  Spinor constant;
  constant[1] = CExpr(P("4"), P("-1"));
  EXPECT_TRUE(all_zero(total_dirac(m, spin_connection_coeffs(m, k0, id.sigma), id, prolong_spinor(kBase, constant))));

  const FramePoint scaled = FramePoint::pinned(diagonal("2"));
  for (int b = 0; b < 4; ++b) {
    SpinorJet spike{Spinor{}, std::vector<Spinor>(4)};
    spike.dy[0][b] = CExpr(Expr(1));
    const Spinor d = total_dirac(m, spin_connection_coeffs(m, k0, scaled.sigma), scaled, spike);
    for (int r = 0; r < 4; ++r) EXPECT_EQ(d[r], m.gamma[0][r][b] * CExpr(Expr(2)));
  }
}

TEST(TotalDirac, RestrictsToDiracOperator) {
  const CliffordModel m = build_clifford();
  const SpinorJet jet = symbolic_spinor_jet(kBase);
  auto check = [&](const Tetrad& t, const SymmetricConnection& kc) {
    const FramePoint frame = FramePoint::pinned(t);
    const Spinor total = total_dirac(m, spin_connection_coeffs(m, kc, frame.sigma), frame, jet);
    const Spinor dh = dirac_operator(m, t, halved(levi_civita_reduction(m, kc, t)), jet);
    for (int r = 0; r < 4; ++r) EXPECT_EQ(total[r], dh[r]) << r;
  };
  check(Tetrad::identity(kBase), SymmetricConnection::zero(kBase));
  Tetrad t = diagonal("exp(x)");
  t.h[1][2] = P("t*z");
  SymmetricConnection kc = SymmetricConnection::zero(kBase);
  kc.set(0, 1, 2, P("x - y"));
  kc.set(3, 3, 0, P("2"));
  check(t, kc);
}

TEST(TotalDirac, SymbolicFrameMatchesPinning) {
  // total_dirac at a generic frame, then pinned, equals total_dirac at the pinned frame
  const CliffordModel m = build_clifford();
  const SpinorJet jet = symbolic_spinor_jet(kBase);
  const FramePoint generic = FramePoint::symbolic(kBase);
  // keep sigma triangular so the symbolic inverse stays polynomial
  FramePoint tri = generic;
  for (std::size_t mu = 0; mu < 4; ++mu)
    for (std::size_t a = 0; a < mu; ++a) tri.sigma[mu][a] = Expr();
  for (std::size_t mu = 0; mu < 4; ++mu) tri.sigma[mu][mu] = Expr(1);
  SymmetricConnection kc = SymmetricConnection::zero(kBase);
  kc.set(1, 0, 0, P("t"));
  const Spinor sym = total_dirac(m, spin_connection_coeffs(m, kc, tri.sigma), tri, jet);

  Tetrad t = Tetrad::identity(kBase);
  t.h[0][2] = P("x^2");
  t.h[1][3] = P("t + z");
  const FramePoint pinned = FramePoint::pinned(t);
  const Spinor direct = total_dirac(m, spin_connection_coeffs(m, kc, pinned.sigma), pinned, jet);
  const Substitution at = pinned.as_substitution();
  for (int r = 0; r < 4; ++r) EXPECT_EQ(sym[r].subst(at), direct[r]) << r;
}

TEST(SplittingForm, HandExpansionAtIdentity) {
  // M^1_0 = 1/8 eta^{11} [gamma_0, gamma_1] = 1/4 [[0, s1], [s1, 0]]
  const CliffordModel m = build_clifford();
  const SpinorSplittingForm f = vertical_splitting_form_spinor(m, identity_matrix(4));
  EXPECT_EQ(f.coef[0][1], lift(antidiagonal(GaussianRational(Rational(1, 4), 0))));
  EXPECT_TRUE(all_zero(f.coef[0][0]));
  EXPECT_TRUE(all_zero(f.leg(2, 3, Spinor{})));
}

TEST(SplittingForm, CoefficientEquality) {
  const CliffordModel m = build_clifford();
  jetcalc::testing::Random rnd(604);
  for (int k = 0; k < 4; ++k) {
    const Tetrad t = rnd.tetrad(kBase, true);
    const SpinorSplittingForm f = vertical_splitting_form_spinor(m, t.h);
    const auto g = splitting_from_generators(m, spin_connection_coeffs(m, SymmetricConnection::zero(kBase), t.h));
    for (std::size_t mu = 0; mu < 4; ++mu)
      for (std::size_t c = 0; c < 4; ++c) EXPECT_EQ(f.coef[mu][c], g[mu][c]);
  }
}

TEST(Complex, ParseLinearInI) {
  const CExpr c = parse_complex("x + 2*y*i");
  EXPECT_EQ(c.re, P("x"));
  EXPECT_EQ(c.im, P("2*y"));
  EXPECT_THROW(parse_complex("i^2"), Error);
}
