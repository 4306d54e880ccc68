#include <gtest/gtest.h>

#include "support.hpp"

using namespace jetcalc;

namespace {

Expr P(const char* s) { return parse_expr(s); }

JetPoint point(JetKind kind, std::map<std::string, Expr> values) { return JetPoint{kind, std::move(values)}; }

}  // namespace

TEST(Chart, RejectsCollisions) {
  EXPECT_THROW(CompositeChart({"x"}, {"x"}, {"y"}), Error);
  EXPECT_THROW(CompositeChart({}, {}, {"y"}), Error);
  // y_x is the velocity of y along x
  EXPECT_THROW(CompositeChart({"x"}, {}, {"y", "y_x"}), Error);
  const CompositeChart ch({"x"}, {"s"}, {"y"});
  EXPECT_EQ(ch.j1y_coords(), (std::vector<std::string>{"x", "s", "y", "s_x", "y_x"}));
  EXPECT_EQ(ch.j1ysigma_coords(), (std::vector<std::string>{"x", "s", "y", "y_tx", "y_s"}));
}

TEST(JetProlong, Examples) {
  const auto ch = CompositeChart::fibred({"x"}, {"y"});
  const JetPoint j = jet_prolong(ch, Section{SectionKind::TotalOverX, {{"y", P("x^2")}}});
  EXPECT_EQ(j["x"], P("x"));
  EXPECT_EQ(j["y"], P("x^2"));
  EXPECT_EQ(j["y_x"], P("2*x"));

  const JetPoint c = jet_prolong(ch, Section{SectionKind::TotalOverX, {{"y", P("7")}}});
  EXPECT_TRUE(c["y_x"].is_zero());

  const CompositeChart comp({"x"}, {"s"}, {"y"});
  const Section h{SectionKind::SigmaOverX, {{"s", P("sin(x)")}}};
  const Section ext{SectionKind::FibreOverSigma, {{"y", P("x*s")}}};
  const JetPoint s = jet_prolong(comp, compose(comp, ext, h));
  EXPECT_EQ(s["y_x"], P("sin(x) + x*cos(x)"));
  EXPECT_EQ(s["s_x"], P("cos(x)"));

  EXPECT_THROW(jet_prolong(comp, ext), Error);
  EXPECT_THROW(validate(comp, Section{SectionKind::SigmaOverX, {{"s", P("y")}}}), Error);
}

TEST(JetTransform, Examples) {
  const auto ch = CompositeChart::fibred({"x"}, {"y"});
  const JetPoint p = point(JetKind::J1Y, {{"x", P("1")}, {"y", P("5")}, {"y_x", P("4")}});

  const FibredMorphism id{{{"x", P("x")}}, {{"y", P("y")}}};
  const JetPoint same = jet_transform(ch, id, p);
  EXPECT_EQ(same["y_x"], P("4"));
  EXPECT_EQ(same["y"], P("5"));

  const FibredMorphism scale{{{"x", P("2*x")}}, {{"y", P("y")}}};
  EXPECT_EQ(jet_transform(ch, scale, p)["y_x"], P("2"));
  EXPECT_EQ(jet_transform(ch, scale, p)["x"], P("2"));

  const FibredMorphism shear{{{"x", P("x")}}, {{"y", P("y + x")}}};
  const JetPoint q = point(JetKind::J1Y, {{"x", P("1")}, {"y", P("0")}, {"y_x", P("0")}});
  EXPECT_EQ(jet_transform(ch, shear, q)["y_x"], P("1"));

  const FibredMorphism singular{{{"x", P("x^2")}}, {{"y", P("y")}}};
  const JetPoint at0 = point(JetKind::J1Y, {{"x", P("0")}, {"y", P("0")}, {"y_x", P("1")}});
  EXPECT_THROW(jet_transform(ch, singular, at0), DomainError);
}

TEST(JetTransform, Functorial) {
  jetcalc::testing::Random rnd(301);
  const auto ch = CompositeChart::fibred({"t", "x"}, {"u", "w"});
  // affine morphism: unit-triangular-ish base part, vertical part 5y + affine(x, y)
  auto morphism = [&] {
    FibredMorphism f;
    const auto& base = ch.base();
    for (std::size_t r = 0; r < base.size(); ++r) {
      Expr e = Expr(rnd.integer(-2, 2));
      for (std::size_t c = r; c < base.size(); ++c)
        e += (c == r ? rnd.coefficient() : Expr(rnd.integer(-2, 2))) * Expr::symbol(base[c]);
      f.base[base[r]] = e;
    }
    for (const auto& v : ch.vertical()) {
      Expr e = Expr(5) * Expr::symbol(v) + Expr(rnd.integer(-2, 2));
      for (const auto& c : ch.y_coords()) e += Expr(rnd.integer(-2, 2)) * Expr::symbol(c);
      f.vertical[v] = e;
    }
    return f;
  };
  for (int k = 0; k < 20; ++k) {
    const FibredMorphism f = morphism(), g = morphism();
    JetPoint p{JetKind::J1Y, {}};
    for (const auto& c : ch.j1y_coords()) p.values[c] = Expr(rnd.integer(-4, 4));
    const JetPoint lhs = jet_transform(ch, compose(f, g), p);
    const JetPoint rhs = jet_transform(ch, f, jet_transform(ch, g, p));
    for (const auto& c : ch.j1y_coords()) EXPECT_EQ(lhs[c], rhs[c]) << c;
  }
}

TEST(CanonicalMonomorphism, Examples) {
  const auto ch = CompositeChart::fibred({"x"}, {"y"});
  const Coordinates coords(ch.y_coords());
  const auto zero = canonical_monomorphism(ch, point(JetKind::J1Y, {{"x", P("x")}, {"y", P("y")}, {"y_x", P("0")}}));
  TangentValuedForm want(coords, 1);
  want.add("x", Form::differential(coords, "x"));
  EXPECT_EQ(zero, want);

  const auto three = canonical_monomorphism(ch, point(JetKind::J1Y, {{"x", P("x")}, {"y", P("y")}, {"y_x", P("3")}}));
  want.add("y", Expr(3) * Form::differential(coords, "x"));
  EXPECT_EQ(three, want);

  JetPoint hol = jet_prolong(ch, Section{SectionKind::TotalOverX, {{"y", P("x^2")}}});
  for (auto& [k, v] : hol.values) v = v.subst({{"x", P("1")}});
  const auto at1 = canonical_monomorphism(ch, hol);
  TangentValuedForm two(coords, 1);
  two.add("x", Form::differential(coords, "x"));
  two.add("y", Expr(2) * Form::differential(coords, "x"));
  EXPECT_EQ(at1, two);
}

TEST(Rho, Examples) {
  const CompositeChart ch({"x"}, {"s"}, {"y"});
  const JetPoint js = point(JetKind::J1Sigma, {{"x", P("x")}, {"s", P("s")}, {"s_x", P("3")}});
  const JetPoint jy = point(JetKind::J1YSigma,
                            {{"x", P("x")}, {"s", P("s")}, {"y", P("y")}, {"y_tx", P("0")}, {"y_s", P("2")}});
  EXPECT_EQ(rho(ch, js, jy)["y_x"], P("6"));

  const JetPoint frozen = point(JetKind::J1Sigma, {{"x", P("x")}, {"s", P("s")}, {"s_x", P("0")}});
  const JetPoint free = point(JetKind::J1YSigma,
                              {{"x", P("x")}, {"s", P("s")}, {"y", P("y")}, {"y_tx", P("a")}, {"y_s", P("b")}});
  EXPECT_EQ(rho(ch, frozen, free)["y_x"], P("a"));

  const Section h{SectionKind::SigmaOverX, {{"s", P("x^2")}}};
  const Section ext{SectionKind::FibreOverSigma, {{"y", P("s*x")}}};
  JetPoint j1s = jet_prolong_fibre(ch, ext);
  for (auto& [k, v] : j1s.values) v = v.subst(h.components);
  const Expr yx = rho(ch, jet_prolong(ch, h), j1s)["y_x"];
  EXPECT_EQ(yx, P("3*x^2"));
  EXPECT_EQ(yx.subst({{"x", P("1")}}), P("3"));

  const JetPoint other = point(JetKind::J1YSigma,
                               {{"x", P("x")}, {"s", P("t")}, {"y", P("y")}, {"y_tx", P("0")}, {"y_s", P("0")}});
  EXPECT_THROW(rho(ch, js, other), ChartMismatch);
}

TEST(Restrict, Examples) {
  const CompositeChart ch({"x"}, {"s"}, {"y"});
  const Section hx{SectionKind::SigmaOverX, {{"s", P("x")}}};
  EXPECT_EQ(restrict_to_section(ch, hx, P("y*s")), P("y*x"));

  const Section h2{SectionKind::SigmaOverX, {{"s", P("x^2")}}};
  const JetPoint pinned = restrict_to_section(ch, h2, generic_jet(ch, JetKind::J1Y));
  EXPECT_EQ(pinned["s_x"], P("2*x"));
  EXPECT_EQ(pinned["s"], P("x^2"));
  EXPECT_EQ(pinned["y_x"], P("y_x"));

  const Section s{SectionKind::TotalOverX, {{"s", P("x^2")}, {"y", P("exp(x)")}}};
  const Section sh = restrict_to_section(ch, h2, s);
  EXPECT_EQ(sh.kind, SectionKind::RestrictedOverX);
  const Section back = embed_restricted(ch, h2, sh);
  EXPECT_EQ(back["s"], s["s"]);
  EXPECT_EQ(back["y"], s["y"]);
  EXPECT_THROW(restrict_to_section(ch, hx, s), Error);
}

TEST(BundleProperties, RhoMatchesComposedProlongation) {
  jetcalc::testing::Random rnd(302);
  for (int k = 0; k < 50; ++k) {
    const CompositeChart ch = rnd.chart(2, 2, 2);
    const Section h = rnd.sigma_section(ch), s = rnd.fibre_section(ch);
    JetPoint j1s = jet_prolong_fibre(ch, s);
    for (auto& [name, v] : j1s.values) v = v.subst(h.components);
    const JetPoint lhs = rho(ch, jet_prolong(ch, h), j1s);
    const JetPoint rhs = jet_prolong(ch, compose(ch, s, h));
    for (const auto& c : ch.j1y_coords()) EXPECT_EQ(lhs[c], rhs[c]) << c;
  }
}

TEST(BundleProperties, DecompositionRecomposes) {
  jetcalc::testing::Random rnd(303);
  for (int k = 0; k < 30; ++k) {
    const CompositeChart ch = rnd.chart(3, 2, 2);
    Section s{SectionKind::TotalOverX, {}};
    for (const auto& v : ch.vertical()) s.components[v] = rnd.polynomial(ch.base(), 3, 2);
    const auto [h, ext] = decompose(ch, s);
    const Section again = compose(ch, ext, h);
    for (const auto& v : ch.vertical()) EXPECT_EQ(again[v], s[v]);
  }
}
