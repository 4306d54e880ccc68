#pragma once

// The check catalog: each named check builds a list of labelled residuals
// that must vanish. Rational-function residuals are decided by the normal
// form; residuals with function atoms fall back to random sampling.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "jetcalc/bundle.hpp"
#include "jetcalc/connection.hpp"
#include "jetcalc/legendre.hpp"
#include "jetcalc/scenario.hpp"
#include "jetcalc/spinor.hpp"

namespace jetcalc {

struct CheckOptions {
  std::uint64_t seed = 42;
  double tol = 1e-9;
  std::size_t samples = 64;
  bool timing = false;
};

enum class Verdict { Pass, Fail, Error };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Error:
      return "error";
  }
  return "error";
}

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Error;
  std::string residual;
  std::optional<double> max_numeric;
  double elapsed_ms = 0;
};

/// Labelled residual expressions collected by a check.
struct Residuals {
  std::vector<std::pair<std::string, Expr>> items;
  bool expect_nonzero = false;  // pass iff some residual is nonzero

  void add(std::string label, const Expr& e) { items.emplace_back(std::move(label), e); }
  void add(const std::string& label, const CExpr& e) {
    add(label + ".re", e.re);
    add(label + ".im", e.im);
  }
  void add(const std::string& prefix, const ExprMatrix& m) {
    for (std::size_t i = 0; i < m.size(); ++i)
      for (std::size_t j = 0; j < m[i].size(); ++j)
        add(prefix + "[" + std::to_string(i) + "," + std::to_string(j) + "]", m[i][j]);
  }
  void add(const std::string& prefix, const Form& f) {
    for (const auto& [idx, c] : f.terms()) {
      std::string basis;
      for (int i : idx) basis += (basis.empty() ? "d" : "^d") + f.coords()[static_cast<std::size_t>(i)];
      add(prefix + "[" + basis + "]", c);
    }
  }
};

namespace detail {

inline std::vector<std::string> primed(const std::vector<std::string>& names, const std::string& mark) {
  std::vector<std::string> out;
  for (const auto& n : names) out.push_back(n + mark);
  return out;
}

inline std::vector<Expr> symbols(const std::vector<std::string>& names) {
  std::vector<Expr> out;
  for (const auto& n : names) out.push_back(Expr::symbol(n));
  return out;
}

inline Residuals check_splitting(const SigmaConnection& as) {
  const auto& ch = as.chart;
  const auto ydot = symbols(primed(ch.fibre(), "'")), sdot = symbols(primed(ch.middle(), "'"));
  const auto ycov = symbols(primed(ch.fibre(), "*")), scov = symbols(primed(ch.middle(), "*"));
  Residuals r;
  const auto v = vertical_splitting_project(as, ydot, sdot);
  for (std::size_t i = 0; i < ydot.size(); ++i) r.add("sum." + ch.fibre()[i], v.fibre_part[i] + v.lifted_fibre[i] - ydot[i]);
  for (std::size_t m = 0; m < sdot.size(); ++m) r.add("sum." + ch.middle()[m], v.sigma_part[m] - sdot[m]);
  const auto again = vertical_splitting_project(as, v.fibre_part, std::vector<Expr>(sdot.size()));
  for (std::size_t i = 0; i < ydot.size(); ++i) r.add("idempotent." + ch.fibre()[i], again.fibre_part[i] - v.fibre_part[i]);
  const auto lifted = vertical_splitting_project(as, v.lifted_fibre, sdot);
  for (std::size_t i = 0; i < ydot.size(); ++i) r.add("horizontal." + ch.fibre()[i], lifted.fibre_part[i]);

  const auto w = covertical_splitting_project(as, ycov, scov);
  for (std::size_t i = 0; i < ycov.size(); ++i) r.add("cosum." + ch.fibre()[i], w.fibre_part[i] - ycov[i]);
  for (std::size_t m = 0; m < scov.size(); ++m) {
    Expr ds = w.sigma_part[m];
    for (std::size_t i = 0; i < ycov.size(); ++i) ds -= as.a[i][m] * w.fibre_part[i];
    r.add("cosum." + ch.middle()[m], ds - scov[m]);
  }
  Expr direct, split;
  for (std::size_t i = 0; i < ydot.size(); ++i) {
    direct += ydot[i] * ycov[i];
    split += v.fibre_part[i] * w.fibre_part[i];
  }
  for (std::size_t m = 0; m < sdot.size(); ++m) {
    direct += sdot[m] * scov[m];
    split += v.sigma_part[m] * w.sigma_part[m];
  }
  r.add("pairing", split - direct);
  // (dy^i - A^i_m ds^m) annihilates the lifted summand
  for (std::size_t i = 0; i < ydot.size(); ++i) {
    Expr c = v.lifted_fibre[i];
    for (std::size_t m = 0; m < sdot.size(); ++m) c -= as.a[i][m] * v.sigma_part[m];
    r.add("annihilator." + ch.fibre()[i], c);
  }
  return r;
}

inline JetPoint generic_restricted_jet(const CompositeChart& ch) {
  JetPoint p{JetKind::J1Y, {}};
  for (const auto& x : ch.base()) p.values.emplace(x, Expr::symbol(x));
  for (const auto& y : ch.fibre()) {
    p.values.emplace(y, Expr::symbol(y));
    for (const auto& x : ch.base()) p.values.emplace(velocity_name(y, x), Expr::symbol(velocity_name(y, x)));
  }
  return p;
}

inline Residuals check_vcd_restriction(const SigmaConnection& as, const Section& h) {
  const auto& ch = as.chart;
  const auto pin = section_pin(ch, h);
  const auto d = vertical_covariant_differential(as, generic_jet(ch, JetKind::J1Y));
  const auto dh = covariant_differential(reduce_connection(as, h), generic_restricted_jet(ch));
  Residuals r;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t l = 0; l < d[i].size(); ++l)
      r.add("D~-D_h[" + ch.fibre()[i] + "," + ch.base()[l] + "]", d[i][l].subst(pin) - dh[i][l]);
  return r;
}

inline Residuals check_composite_reduction(const SigmaConnection& as, const Connection& g, const Section& h) {
  const auto& ch = as.chart;
  Residuals r;
  const auto integral = is_integral_section(ch, g, h);
  if (integral.symbolic || !integral.integral) r.add("integrality", integral.residual);
  const auto lhs = restrict_connection(ch, composite_connection(as, g), h);
  const auto rhs = reduce_connection(as, h);
  for (std::size_t i = 0; i < lhs.coef.size(); ++i)
    for (std::size_t l = 0; l < lhs.coef[i].size(); ++l)
      r.add("restrict-reduce[" + ch.fibre()[i] + "," + ch.base()[l] + "]", lhs.coef[i][l] - rhs.coef[i][l]);
  return r;
}

inline Residuals check_rho_prolong(const CompositeChart& ch, const Section& h, const Section& fibre_section) {
  const JetPoint j1h = jet_prolong(ch, h);
  JetPoint j1s = jet_prolong_fibre(ch, fibre_section);
  for (auto& [k, v] : j1s.values) v = v.subst(h.components);
  const JetPoint lhs = rho(ch, j1h, j1s);
  const JetPoint rhs = jet_prolong(ch, compose(ch, fibre_section, h));
  Residuals r;
  for (const auto& c : ch.j1y_coords()) r.add(c, lhs[c] - rhs[c]);
  return r;
}

inline void add_linear_difference(Residuals& r, const std::string& prefix, const LinearConnection& a,
                                  const LinearConnection& b) {
  if (a.fibre.size() != b.fibre.size() || a.base != b.base || a.middle != b.middle) {
    r.add(prefix + ".shape", Expr(1));
    return;
  }
  for (std::size_t m = 0; m < a.gamma.size(); ++m)
    for (std::size_t l = 0; l < a.base.size(); ++l)
      r.add(prefix + ".Gamma[" + a.middle[m] + "," + a.base[l] + "]", a.gamma[m][l] - b.gamma[m][l]);
  for (std::size_t l = 0; l < a.base.size(); ++l)
    r.add(prefix + ".A_" + a.base[l], [&] {
      ExprMatrix d = a.a[l];
      for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) d[i][j] -= b.a[l][i][j];
      return d;
    }());
}

inline Residuals check_dual_pairing(const LinearConnection& a) {
  Residuals r;
  const auto pd = pairing_derivative(a, dual_connection(a));
  for (std::size_t l = 0; l < pd.size(); ++l) r.add("pairing." + a.base[l], pd[l]);
  const Connection g = as_connection(a);
  add_linear_difference(r, "dual(VG)-V*G", dual_connection(vertical_lift(g)), vertical_colift(g));
  return r;
}

inline Residuals check_tensor_leibniz(const LinearConnection& a, const LinearConnection& b) {
  Residuals r;
  const auto res = tensor_leibniz_residual(a, b, symbols(primed(a.fibre, ".u")), symbols(primed(b.fibre, ".v")));
  std::size_t n = 0;
  for (const auto& l : a.base)
    for (const auto& i : a.fibre)
      for (const auto& k : b.fibre) r.add("leibniz[" + l + "," + i + "," + k + "]", res[n++]);
  return r;
}

inline Residuals check_hamiltonian_lift(const CompositeChart& ch, const Connection& g, const SymmetricConnection& k) {
  const LegendreChart pi(ch);
  Residuals r;
  r.add("d(lift _| Omega)", hamiltonian_residual(pi, lift_to_legendre(pi, g, k)));
  return r;
}

inline Residuals check_legendre_constraint(const SigmaConnection& as, const Lagrangian& l, bool factored) {
  const auto& ch = as.chart;
  Residuals r;
  r.expect_nonzero = !factored;
  r.add("constraint", factored_lagrangian_constraint(as, l));
  if (factored) {
    const auto image = legendre_morphism(ch, l, generic_jet(ch, JetKind::J1Y));
    const auto bar = adapted_momenta(as, image);
    for (const auto& m : ch.middle())
      for (const auto& x : ch.base()) r.add("pbar." + momentum_name(m, x), bar.at(momentum_name(m, x)));
  }
  return r;
}

inline Residuals check_clifford() {
  const CliffordModel m = build_clifford();
  Residuals r;
  r.add("anticommutator-failures", Expr(clifford_relation_failures(m)));
  r.add("lorentz-failures", Expr(lorentz_action_failures(m)));
  int bad = 0;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (gamma_add(m.generator[a][b], m.generator[b][a]) != GammaMatrix{}) ++bad;
  r.add("antisymmetry-failures", Expr(bad));
  return r;
}

inline Residuals check_gamma_h_metric(const Tetrad& t) {
  const CliffordModel m = build_clifford();
  Residuals r;
  for (std::size_t l = 0; l < 4; ++l)
    for (std::size_t mu = l; mu < 4; ++mu) {
      const auto res = induced_metric_residual(m, t, l, mu);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          r.add("anticommutator[" + std::to_string(l) + std::to_string(mu) + "][" + std::to_string(i) +
                    std::to_string(j) + "]",
                res[i][j]);
    }
  return r;
}

inline Residuals check_total_dirac(const Tetrad& t, const SymmetricConnection& k, const SpinorJet& jet) {
  const CliffordModel m = build_clifford();
  const FramePoint frame = FramePoint::pinned(t);
  const SpinConnection conn = spin_connection_coeffs(m, k, frame.sigma);
  const Spinor total = total_dirac(m, conn, frame, jet);
  SpinCoefficients reduced = levi_civita_reduction(m, k, t);
  const SpinCoefficients generic = reduce_spin_connection(conn, t);
  Residuals r;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    ExprMatrix d = reduced[mu];
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b) d[a][b] -= generic[mu][a][b];
    r.add("reduction." + t.base[mu], d);
  }
  for (auto& mat : reduced)
    for (auto& row : mat)
      for (auto& e : row) e = Expr(Rational(1, 2)) * e;
  const Spinor dh = dirac_operator(m, t, reduced, jet);
  for (int a = 0; a < 4; ++a) r.add("dirac[" + std::to_string(a) + "]", total[a] - dh[a]);
  return r;
}

inline Residuals check_char_form(const SigmaConnection& as) {
  const auto& ch = as.chart;
  const TangentValuedForm form = characterizing_form(as);
  SigmaConnection bare = as;
  for (auto& row : bare.tilde)
    for (auto& e : row) e = Expr();
  const TangentValuedForm other = characterizing_form(bare);
  Residuals r;
  for (const auto& dir : ch.vertical()) r.add("tilde-independence." + dir, form.leg(dir) - other.leg(dir));
  // each leg carries the horizontal lift of d_m given by the splitting
  for (std::size_t m = 0; m < ch.middle().size(); ++m) {
    std::vector<Expr> e(ch.middle().size());
    e[m] = Expr(1);
    const auto lift = vertical_splitting_project(as, std::vector<Expr>(ch.fibre().size()), e);
    std::vector<std::string> basis = ch.base();
    basis.push_back(ch.middle()[m]);
    for (std::size_t n = 0; n < ch.middle().size(); ++n)
      r.add("lift." + ch.middle()[m] + "." + ch.middle()[n],
            form.leg(ch.middle()[n]).coefficient(basis) - Expr(n == m ? 1 : 0));
    for (std::size_t i = 0; i < ch.fibre().size(); ++i)
      r.add("lift." + ch.middle()[m] + "." + ch.fibre()[i],
            form.leg(ch.fibre()[i]).coefficient(basis) - lift.lifted_fibre[i]);
  }
  return r;
}

inline Residuals collect(const Scenario& s, const CheckDirective& c) {
  const std::string& n = c.name;
  if (n == "clifford") return check_clifford();
  if (n == "gamma-h-metric") return check_gamma_h_metric(s.tetrads.at(c.arg("tetrad")));
  if (n == "total-dirac-restriction") {
    const Tetrad& t = s.tetrads.at(c.arg("tetrad"));
    const std::string kname = s.spin_connections.at(c.arg("spin"));
    const SymmetricConnection k = kname.empty() ? SymmetricConnection::zero(t.base) : s.symmetric_connections.at(kname);
    const SpinorJet jet = c.args.count("spinor") ? s.spinor_jets.at(c.arg("spinor")) : symbolic_spinor_jet(t.base);
    return check_total_dirac(t, k, jet);
  }
  if (n == "dual-pairing") return check_dual_pairing(s.linear_connections.at(c.arg("connection")));
  if (n == "tensor-leibniz") {
    const auto& a = s.linear_connections.at(c.arg("connection"));
    return check_tensor_leibniz(a, s.linear_connections.at(c.arg("other", c.arg("connection"))));
  }
  const CompositeChart& ch = *s.chart;
  if (n == "splitting") return check_splitting(s.sigma_connections.at(c.arg("connection")));
  if (n == "char-form") return check_char_form(s.sigma_connections.at(c.arg("connection")));
  if (n == "vcd-restriction")
    return check_vcd_restriction(s.sigma_connections.at(c.arg("connection")), s.sections.at(c.arg("section")));
  if (n == "composite-reduction")
    return check_composite_reduction(s.sigma_connections.at(c.arg("connection")), s.connections.at(c.arg("gamma")),
                                     s.sections.at(c.arg("section")));
  if (n == "rho-prolong") return check_rho_prolong(ch, s.sections.at(c.arg("section")), s.sections.at(c.arg("fibre-section")));
  if (n == "hamiltonian-lift")
    return check_hamiltonian_lift(ch, s.connections.at(c.arg("connection")), s.symmetric_connections.at(c.arg("k")));
  if (n == "legendre-constraint")
    return check_legendre_constraint(s.sigma_connections.at(c.arg("connection")), s.lagrangians.at(c.arg("lagrangian")),
                                     c.arg("expect", "factored") == "factored");
  throw Error("unknown check '" + n + "'");
}

}  // namespace detail

/// Decides a residual list: exact for rational functions, sampled otherwise.
inline CheckResult decide(const std::string& name, const Residuals& r, const CheckOptions& opt) {
  CheckResult out;
  out.name = name;
  std::vector<Expr> nonzero;
  std::string text;
  bool exact_nonzero = false;
  std::set<std::string> syms;
  for (const auto& [label, e] : r.items) {
    if (e.is_zero()) continue;
    nonzero.push_back(e);
    if (e.is_rational_function()) exact_nonzero = true;
    for (const auto& s : e.free_symbols()) syms.insert(s);
    if (!text.empty()) text += "; ";
    text += label + " = " + e.str();
  }
  out.residual = text.empty() ? "0" : text;
  out.max_numeric = nonzero.empty() ? 0.0 : max_abs_residual(nonzero, sample_points(syms, opt.samples, opt.seed));
  const bool vanishes = nonzero.empty() || (!exact_nonzero && *out.max_numeric <= opt.tol);
  out.verdict = vanishes != r.expect_nonzero ? Verdict::Pass : Verdict::Fail;
  return out;
}

inline CheckResult run_check(const Scenario& s, const CheckDirective& c, const CheckOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult out;
  try {
    out = decide(c.label, detail::collect(s, c), opt);
  } catch (const std::exception& e) {
    out.name = c.label;
    out.verdict = Verdict::Error;
    out.residual = e.what();
    out.max_numeric.reset();
  }
  if (opt.timing)
    out.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

/// Runs every directive on up to `jobs` threads; results keep declaration order.
inline std::vector<CheckResult> run_checks(const Scenario& s, const CheckOptions& opt, unsigned jobs = 1) {
  std::vector<CheckResult> results(s.checks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < s.checks.size(); i = next++) results[i] = run_check(s, s.checks[i], opt);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(s.checks.size())));
  if (jobs == 1) {
    worker();
    return results;
  }
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace jetcalc
