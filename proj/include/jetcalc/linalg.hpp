#pragma once

// Small dense matrices of expressions. Sizes here are at most the world
// dimension, so cofactor expansion is adequate and keeps entries polynomial
// until the final division by the determinant.

#include <string>
#include <vector>

#include "jetcalc/error.hpp"
#include "jetcalc/expr.hpp"

namespace jetcalc {

using ExprMatrix = std::vector<std::vector<Expr>>;

inline ExprMatrix zero_matrix(std::size_t rows, std::size_t cols) {
  return ExprMatrix(rows, std::vector<Expr>(cols));
}

inline ExprMatrix identity_matrix(std::size_t n) {
  auto m = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) m[i][i] = Expr(1);
  return m;
}

inline ExprMatrix matmul(const ExprMatrix& a, const ExprMatrix& b) {
  const std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
  auto out = zero_matrix(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < k; ++l) {
      if (a[i][l].is_zero()) continue;
      for (std::size_t j = 0; j < m; ++j)
        if (!b[l][j].is_zero()) out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

namespace detail {

inline Expr minor_det(const ExprMatrix& m, std::vector<std::size_t>& rows, std::vector<std::size_t>& cols) {
  const std::size_t n = rows.size();
  if (n == 0) return Expr(1);
  if (n == 1) return m[rows[0]][cols[0]];
  const std::size_t r = rows.front();
  rows.erase(rows.begin());
  Expr out;
  for (std::size_t c = 0; c < n; ++c) {
    const Expr& entry = m[r][cols[c]];
    if (entry.is_zero()) continue;
    const std::size_t col = cols[c];
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(c));
    Expr sub = entry * minor_det(m, rows, cols);
    cols.insert(cols.begin() + static_cast<std::ptrdiff_t>(c), col);
    out = (c % 2 == 0) ? out + sub : out - sub;
  }
  rows.insert(rows.begin(), r);
  return out;
}

}  // namespace detail

inline Expr determinant(const ExprMatrix& m) {
  std::vector<std::size_t> rows(m.size()), cols(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) rows[i] = cols[i] = i;
  return detail::minor_det(m, rows, cols);
}

/// Inverse via adjugate over determinant. Throws DomainError when the
/// determinant is identically zero.
inline ExprMatrix inverse(const ExprMatrix& m) {
  const std::size_t n = m.size();
  const Expr det = determinant(m);
  if (det.is_zero()) throw DomainError("singular matrix");
  auto out = zero_matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<std::size_t> rows, cols;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      Expr cof = detail::minor_det(m, rows, cols);
      if ((i + j) % 2) cof = -cof;
      out[i][j] = cof / det;
    }
  return out;
}

inline ExprMatrix subst(const ExprMatrix& m, const std::map<std::string, Expr>& map) {
  ExprMatrix out = m;
  for (auto& row : out)
    for (auto& e : row) e = e.subst(map);
  return out;
}

}  // namespace jetcalc
