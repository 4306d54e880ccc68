// Acceptance suite: one PASS/FAIL line per criterion; exit status 0 iff all pass.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <sys/wait.h>

#include "support.hpp"

using namespace jetcalc;
using jetcalc::testing::Random;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

bool all_zero(const ExprMatrix& m) {
  for (const auto& row : m)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

bool all_zero(const Spinor& s) {
  for (const auto& e : s)
    if (!e.is_zero()) return false;
  return true;
}

Outcome clifford_suite() {
  const CliffordModel m = build_clifford();
  const int rel = clifford_relation_failures(m), lor = lorentz_action_failures(m);
  int triples = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) triples += 4;
  return {rel == 0 && lor == 0 && triples == 24,
          "16 anticommutators, " + std::to_string(triples) + " Lorentz triples, failures " +
              std::to_string(rel + lor)};
}

Outcome exterior_suite() {
  Random rnd(2);
  static const std::vector<std::string> pool = {"a", "b", "c", "d", "e", "f"};
  int bad = 0;
  for (int k = 0; k < 100; ++k) {
    const int n = rnd.integer(2, 6);
    const Coordinates coords(std::vector<std::string>(pool.begin(), pool.begin() + n));
    const int p = rnd.integer(0, n - 1);
    const Form a = rnd.form(coords, p);
    const int q = rnd.integer(0, n - 1 - p);
    const Form b = rnd.form(coords, q);
    if (!exterior_derivative(exterior_derivative(a)).is_zero()) ++bad;
    const Form lhs = exterior_derivative(wedge(a, b));
    Form rhs = wedge(exterior_derivative(a), b);
    const Form tail = wedge(a, exterior_derivative(b));
    rhs = p % 2 == 0 ? rhs + tail : rhs - tail;
    if (static_cast<std::size_t>(p + q) < coords.size() && !(lhs == rhs)) ++bad;
  }
  return {bad == 0, "100 random form pairs, failures " + std::to_string(bad)};
}

Outcome rho_prolongation() {
  Random rnd(3);
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    const CompositeChart ch = rnd.chart(2, 2, 2);
    const Section h = rnd.sigma_section(ch), s = rnd.fibre_section(ch);
    JetPoint j1s = jet_prolong_fibre(ch, s);
    for (auto& [name, v] : j1s.values) v = v.subst(h.components);
    const JetPoint lhs = rho(ch, jet_prolong(ch, h), j1s);
    const JetPoint rhs = jet_prolong(ch, compose(ch, s, h));
    for (const auto& c : ch.j1y_coords())
      if (lhs[c] != rhs[c]) {
        ++bad;
        break;
      }
  }
  return {bad == 0, "50 random (h, s_Sigma), failures " + std::to_string(bad)};
}

Outcome vcd_restriction() {
  Random rnd(4);
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    const CompositeChart ch = rnd.chart(2, 2, 2);
    const SigmaConnection as = rnd.sigma_connection(ch);
    const Section h = rnd.sigma_section(ch);
    const auto pin = section_pin(ch, h);
    const auto d = vertical_covariant_differential(as, generic_jet(ch, JetKind::J1Y));
    JetPoint p{JetKind::J1Y, {}};
    for (const auto& x : ch.base()) p.values.emplace(x, Expr::symbol(x));
    for (const auto& y : ch.fibre()) {
      p.values.emplace(y, Expr::symbol(y));
      for (const auto& x : ch.base()) p.values.emplace(velocity_name(y, x), Expr::symbol(velocity_name(y, x)));
    }
    const auto dh = covariant_differential(reduce_connection(as, h), p);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t l = 0; l < d[i].size(); ++l)
        if (d[i][l].subst(pin) != dh[i][l]) ++bad;
  }
  return {bad == 0, "50 random (A_Sigma, h), failures " + std::to_string(bad)};
}

Outcome composite_reduction() {
  Random rnd(5);
  int bad = 0, non_integral = 0;
  for (int k = 0; k < 20; ++k) {
    const CompositeChart ch = rnd.chart(2, 2, 2);
    const SigmaConnection as = rnd.sigma_connection(ch);
    const Section h = rnd.sigma_section(ch);
    // Gamma^m_l = d_l h^m + P^m_l(x, s) (s^m - h^m(x)): affine family with h integral
    Connection g = Connection::on_sigma(ch);
    for (std::size_t m = 0; m < ch.middle().size(); ++m)
      for (std::size_t l = 0; l < ch.base().size(); ++l) {
        const auto& name = ch.middle()[m];
        g.coef[m][l] = h[name].diff(ch.base()[l]);
        if (k % 2) g.coef[m][l] += rnd.polynomial(ch.sigma_coords(), 2, 1) * (Expr::symbol(name) - h[name]);
      }
    if (!is_integral_section(ch, g, h).integral) ++non_integral;
    if (!(restrict_connection(ch, composite_connection(as, g), h) == reduce_connection(as, h))) ++bad;
  }
  return {bad == 0 && non_integral == 0,
          "20 integral (Gamma, h), non-integral " + std::to_string(non_integral) + ", failures " + std::to_string(bad)};
}

Outcome hamiltonian_lift() {
  Random rnd(6);
  int bad = 0;
  for (int k = 0; k < 50; ++k) {
    const CompositeChart ch = rnd.chart(2, 1, 2, 0);
    const LegendreChart pi(ch);
    const Connection g = rnd.connection(ch.base(), ch.vertical(), ch.y_coords());
    const SymmetricConnection kc = rnd.symmetric(ch.base());
    if (!hamiltonian_residual(pi, lift_to_legendre(pi, g, kc)).is_zero()) ++bad;
  }
  return {bad == 0, "50 random (Gamma, K), failures " + std::to_string(bad)};
}

Outcome legendre_constraint() {
  Random rnd(7);
  int bad_factored = 0, bad_pbar = 0, bad_generic = 0, bad_literal = 0;
  for (int k = 0; k < 20; ++k) {
    const CompositeChart ch = rnd.chart(2, 2, 2);
    const SigmaConnection as = rnd.sigma_connection(ch);
    std::vector<std::string> slots = ch.y_coords();
    for (const auto& y : ch.fibre())
      for (const auto& x : ch.base()) slots.push_back(velocity_name(y, x));
    const Lagrangian lf = factor_through(as, rnd.polynomial(slots, 4, 3));
    if (!all_zero(factored_lagrangian_constraint(as, lf))) ++bad_factored;
    const auto image = legendre_morphism(ch, lf, generic_jet(ch, JetKind::J1Y));
    const auto bar = adapted_momenta(as, image);
    for (const auto& m : ch.middle())
      for (const auto& x : ch.base())
        if (!bar.at(momentum_name(m, x)).is_zero()) ++bad_pbar;
    // the opposite-sign combination A dL/dy - dL/ds equals 2 A dL/dy here
    for (std::size_t m = 0; m < ch.middle().size(); ++m)
      for (const auto& x : ch.base()) {
        Expr literal = -lf.density.diff(velocity_name(ch.middle()[m], x)), twice;
        for (std::size_t i = 0; i < ch.fibre().size(); ++i) {
          const Expr t = as.a[i][m] * lf.density.diff(velocity_name(ch.fibre()[i], x));
          literal += t;
          twice += Expr(2) * t;
        }
        if (literal != twice) ++bad_literal;
      }

    const std::vector<std::string> j1 = ch.j1y_coords();
    const Expr sv = Expr::symbol(velocity_name(ch.middle()[0], ch.base()[0]));
    const Lagrangian lg{rnd.polynomial(j1, 4, 3) + rnd.coefficient() * sv * sv};
    if (all_zero(factored_lagrangian_constraint(as, lg))) ++bad_generic;
  }
  return {bad_factored + bad_pbar + bad_generic + bad_literal == 0,
          "20 factored: residual " + std::to_string(bad_factored) + ", pbar " + std::to_string(bad_pbar) +
              "; 20 generic: zero residual " + std::to_string(bad_generic) + "; opposite sign identity " +
              std::to_string(bad_literal)};
}

Outcome dual_tensor() {
  Random rnd(8);
  int bad_pairing = 0, bad_leibniz = 0, bad_lift = 0;
  for (int k = 0; k < 20; ++k) {
    const CompositeChart ch = rnd.chart(2, 2, 2);
    const LinearConnection a = rnd.linear(ch);
    for (const auto& e : pairing_derivative(a, dual_connection(a)))
      if (!e.is_zero()) ++bad_pairing;
    LinearConnection b = rnd.linear(ch);
    b.gamma = a.gamma;
    std::vector<Expr> u, v;
    for (std::size_t i = 0; i < a.fibre.size(); ++i) u.push_back(rnd.polynomial(ch.sigma_coords(), 2, 1));
    for (std::size_t i = 0; i < b.fibre.size(); ++i) v.push_back(rnd.polynomial(ch.sigma_coords(), 2, 1));
    for (const auto& e : tensor_leibniz_residual(a, b, u, v))
      if (!e.is_zero()) ++bad_leibniz;
    const Connection g = rnd.connection(ch.base(), ch.vertical(), ch.y_coords());
    if (!(dual_connection(vertical_lift(g)) == vertical_colift(g))) ++bad_lift;
  }
  return {bad_pairing + bad_leibniz + bad_lift == 0,
          "20 cases: pairing " + std::to_string(bad_pairing) + ", Leibniz " + std::to_string(bad_leibniz) +
              ", dual(VG) vs V*G " + std::to_string(bad_lift)};
}

Outcome total_dirac_restriction() {
  Random rnd(9);
  const CliffordModel m = build_clifford();
  const std::vector<std::string> base = {"t", "x", "y", "z"};
  const SpinorJet jet = symbolic_spinor_jet(base);
  int bad = 0;
  for (int k = 0; k < 20; ++k) {
    const Tetrad t = rnd.tetrad(base, k % 2 == 1);
    const SymmetricConnection kc = rnd.symmetric(base, 0.8);
    const FramePoint frame = FramePoint::pinned(t);
    const Spinor total = total_dirac(m, spin_connection_coeffs(m, kc, frame.sigma), frame, jet);
    SpinCoefficients a = levi_civita_reduction(m, kc, t);
    for (auto& mat : a)
      for (auto& row : mat)
        for (auto& e : row) e = Expr(Rational(1, 2)) * e;
    const Spinor dh = dirac_operator(m, t, a, jet);
    Spinor diff;
    for (int r = 0; r < 4; ++r) diff[r] = total[r] - dh[r];
    if (!all_zero(diff)) ++bad;
  }
  return {bad == 0, "20 random tetrads (10 dense) and K, failures " + std::to_string(bad)};
}

Outcome cli_determinism() {
  const std::string cmd = std::string("\"") + JETCALC_CLI + "\" run \"" + JETCALC_EXAMPLES +
                          "/full.scn\" --seed 42 --json";
  auto capture = [&](int& status) {
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) {
      status = -1;
      return out;
    }
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) out.append(buf, n);
    const int raw = pclose(pipe);
    status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
  };
  int s1 = 0, s2 = 0;
  const std::string a = capture(s1), b = capture(s2);
  return {s1 == 0 && s2 == 0 && !a.empty() && a == b,
          "exit codes " + std::to_string(s1) + "/" + std::to_string(s2) + ", " + std::to_string(a.size()) +
              " bytes, identical " + (a == b ? "yes" : "no")};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    double limit_s;  // 0: no runtime bound
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "Clifford relations and Lorentz generators", 1, clifford_suite},
      {2, "exterior d^2 = 0 and Leibniz rule", 10, exterior_suite},
      {3, "rho-prolongation coherence", 0, rho_prolongation},
      {4, "vertical covariant differential restriction", 0, vcd_restriction},
      {5, "composite-connection reduction", 0, composite_reduction},
      {6, "Hamiltonian lift closedness", 60, hamiltonian_lift},
      {7, "Legendre constraint", 0, legendre_constraint},
      {8, "dual pairing, tensor Leibniz, dual vertical lift", 0, dual_tensor},
      {9, "total Dirac restriction", 60, total_dirac_restriction},
      {10, "CLI determinism", 0, cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0 && s >= c.limit_s) {
      o.pass = false;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.limit_s)) + " s budget";
    }
    failed += !o.pass;
    std::printf("%s  %2d  %-48s %8.3f s  %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title, s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
