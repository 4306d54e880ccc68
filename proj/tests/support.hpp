#pragma once

// Seeded random generators of polynomial test objects.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "jetcalc/jetcalc.hpp"

namespace jetcalc::testing {

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  /// Nonzero integer coefficient in [-3, 3].
  Expr coefficient() {
    int c = integer(-3, 2);
    return Expr(c >= 0 ? c + 1 : c);
  }

  /// Sum of up to `terms` monomials of total degree <= `degree`, integer coefficients.
  Expr polynomial(const std::vector<std::string>& vars, int terms = 3, int degree = 2) {
    Expr out;
    const int n = integer(1, terms);
    for (int t = 0; t < n; ++t) {
      Expr m = coefficient();
      if (!vars.empty()) {
        const int d = integer(0, degree);
        for (int k = 0; k < d; ++k) m = m * Expr::symbol(vars[integer(0, static_cast<int>(vars.size()) - 1)]);
      }
      out += m;
    }
    return out;
  }

  /// Polynomial that is zero with probability `p_zero`.
  Expr sparse_polynomial(const std::vector<std::string>& vars, double p_zero, int terms = 2, int degree = 2) {
    return coin(p_zero) ? Expr() : polynomial(vars, terms, degree);
  }

  Form form(const Coordinates& coords, int degree, int terms = 3) {
    Form out(coords, degree);
    for (int t = 0; t < terms; ++t) {
      Form::Index idx;
      for (int k = 0; k < degree; ++k) idx.push_back(integer(0, static_cast<int>(coords.size()) - 1));
      out.add_term(idx, polynomial(coords.names(), 2, 2));
    }
    return out;
  }

  CompositeChart chart(int max_base, int max_middle, int max_fibre, int min_middle = 1) {
    static const char* base[] = {"t", "x", "z", "r"};
    static const char* middle[] = {"s", "q", "v"};
    static const char* fibre[] = {"u", "w", "y"};
    std::vector<std::string> b, m, f;
    for (int i = integer(1, max_base); i > 0; --i) b.push_back(base[b.size()]);
    for (int i = integer(min_middle, max_middle); i > 0; --i) m.push_back(middle[m.size()]);
    for (int i = integer(1, max_fibre); i > 0; --i) f.push_back(fibre[f.size()]);
    return CompositeChart(b, m, f);
  }

  Section sigma_section(const CompositeChart& ch) {
    Section h{SectionKind::SigmaOverX, {}};
    for (const auto& m : ch.middle()) h.components[m] = polynomial(ch.base(), 3, 2);
    return h;
  }

  Section fibre_section(const CompositeChart& ch) {
    Section s{SectionKind::FibreOverSigma, {}};
    for (const auto& y : ch.fibre()) s.components[y] = polynomial(ch.sigma_coords(), 3, 2);
    return s;
  }

  SigmaConnection sigma_connection(const CompositeChart& ch) {
    SigmaConnection as(ch);
    for (auto& row : as.tilde)
      for (auto& e : row) e = sparse_polynomial(ch.y_coords(), 0.3);
    for (auto& row : as.a)
      for (auto& e : row) e = sparse_polynomial(ch.y_coords(), 0.2);
    return as;
  }

  Connection connection(const std::vector<std::string>& base, const std::vector<std::string>& vertical,
                        const std::vector<std::string>& domain) {
    Connection c = Connection::zero(base, vertical, domain);
    for (auto& row : c.coef)
      for (auto& e : row) e = sparse_polynomial(domain, 0.3);
    return c;
  }

  LinearConnection linear(const CompositeChart& ch) {
    LinearConnection c = LinearConnection::zero(ch.base(), ch.middle(), ch.fibre());
    for (auto& row : c.gamma)
      for (auto& e : row) e = sparse_polynomial(c.domain(), 0.3);
    for (auto& m : c.a)
      for (auto& row : m)
        for (auto& e : row) e = sparse_polynomial(c.domain(), 0.4);
    return c;
  }

  SymmetricConnection symmetric(const std::vector<std::string>& base, double p_zero = 0.5) {
    SymmetricConnection k = SymmetricConnection::zero(base);
    const std::size_t n = base.size();
    for (std::size_t mu = 0; mu < n; ++mu)
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) k.set(mu, a, b, sparse_polynomial(base, p_zero, 2, 2));
    return k;
  }

  /// Polynomial tetrad with constant determinant, so the inverse stays
  /// polynomial. `dense` multiplies a unit-lower by an upper triangular factor,
  /// filling every entry; otherwise only the upper factor is used.
  Tetrad tetrad(const std::vector<std::string>& base, bool dense) {
    ExprMatrix lower = identity_matrix(4), upper = zero_matrix(4, 4);
    for (std::size_t l = 0; l < 4; ++l)
      for (std::size_t a = 0; a < 4; ++a) {
        if (l == a)
          upper[l][a] = coefficient();
        else if (l < a)
          upper[l][a] = sparse_polynomial(base, dense ? 0.5 : 0.4, dense ? 1 : 2, dense ? 1 : 2);
        else if (dense)
          lower[l][a] = sparse_polynomial(base, 0.5, 1, 1);
      }
    return Tetrad{base, dense ? matmul(lower, upper) : upper};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace jetcalc::testing
