#pragma once

#include <map>
#include <vector>

#include "hlmax/rational.hpp"
#include "hlmax/symtensor.hpp"

namespace hlmax::detail {

template <class T>
T abs_value(const T& v) {
  return v < T(0) ? T(-v) : v;
}

/// Sparse polynomial in `dim` variables keyed by exponent vector.
template <class T>
using Polynomial = std::map<Exponents, T>;

/// prod_i (sum_j M(i, j) x_j)^{alpha_i} for a row-major square matrix M.
template <class T>
Polynomial<T> expand_linear_monomial(const std::vector<T>& matrix, int dim, const Exponents& alpha) {
  Polynomial<T> poly;
  poly[Exponents(dim, 0)] = T(1);
  for (int i = 0; i < dim; ++i) {
    for (int rep = 0; rep < alpha[i]; ++rep) {
      Polynomial<T> next;
      for (const auto& [e, c] : poly) {
        for (int j = 0; j < dim; ++j) {
          const T& m = matrix[i * dim + j];
          if (m == T(0)) continue;
          Exponents f = e;
          ++f[j];
          next[f] += c * m;
        }
      }
      poly = std::move(next);
    }
  }
  return poly;
}

template <class T>
T factorial_t(int n) {
  T f(1);
  for (int i = 2; i <= n; ++i) f *= T(i);
  return f;
}

template <class T>
T determinant(const std::vector<T>& m, int d) {
  if (d == 1) return m[0];
  if (d == 2) return m[0] * m[3] - m[1] * m[2];
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

/// Integral of x^alpha over conv(0, v_1, ..., v_d) for every |alpha| = order,
/// via x = V t and int_{standard simplex} t^beta = beta! / (|beta| + d)!.
template <class T>
void add_simplex_moments(const std::vector<std::vector<T>>& vertices, const std::vector<int>& simplex, int dim,
                         SymmetricTensor<T>& out) {
  std::vector<T> V(dim * dim);
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i < dim; ++i) V[i * dim + j] = vertices[simplex[j]][i];
  const T jac = abs_value(determinant(V, dim));
  const T denom = factorial_t<T>(out.order() + dim);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto poly = expand_linear_monomial(V, dim, out.exponents()[k]);
    T sum(0);
    for (const auto& [beta, c] : poly) {
      T num(1);
      for (int b : beta) num *= factorial_t<T>(b);
      sum += c * num;
    }
    out[k] += jac * sum / denom;
  }
}

/// Moments of A K from moments of K: |det A| sum_beta c_{alpha beta}(A) T_beta.
template <class T>
SymmetricTensor<T> push_forward_t(const SymmetricTensor<T>& base, const std::vector<T>& A, int dim) {
  SymmetricTensor<T> out(dim, base.order());
  const T jac = abs_value(determinant(A, dim));
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto poly = expand_linear_monomial(A, dim, out.exponents()[k]);
    T sum(0);
    for (const auto& [beta, c] : poly) sum += c * base.at(beta);
    out[k] = jac * sum;
  }
  return out;
}

}  // namespace hlmax::detail
