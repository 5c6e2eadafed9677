#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "hlmax/error.hpp"

namespace hlmax {

/// Exponent vector alpha; a component of an order-k symmetric tensor is
/// addressed by the multiset of its indices, i.e. by alpha with |alpha| = k.
using Exponents = std::vector<int>;

/// All alpha with |alpha| = order in `dim` variables, lexicographically descending.
inline std::vector<Exponents> exponent_vectors(int dim, int order) {
  std::vector<Exponents> out;
  Exponents cur(dim, 0);
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == dim - 1) {
      cur[pos] = remaining;
      out.push_back(cur);
      return;
    }
    for (int e = remaining; e >= 0; --e) {
      cur[pos] = e;
      self(self, pos + 1, remaining - e);
    }
  };
  if (dim > 0) rec(rec, 0, order);
  return out;
}

/// k! / prod(alpha_i!): how many index tuples share the exponent vector alpha.
inline double multinomial(const Exponents& alpha) {
  double result = 1.0;
  int n = 0;
  for (int a : alpha) {
    for (int j = 1; j <= a; ++j) {
      ++n;
      result = result * n / j;
    }
  }
  return result;
}

/// Fully symmetric tensor stored once per multiset of indices.
template <class T>
class SymmetricTensor {
 public:
  SymmetricTensor() = default;
  SymmetricTensor(int dim, int order)
      : dim_(dim), order_(order), exponents_(exponent_vectors(dim, order)), values_(exponents_.size(), T(0)) {}

  int dim() const { return dim_; }
  int order() const { return order_; }
  std::size_t size() const { return values_.size(); }

  const std::vector<Exponents>& exponents() const { return exponents_; }
  const std::vector<T>& values() const { return values_; }

  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::size_t index_of(const Exponents& alpha) const {
    const auto it = std::find(exponents_.begin(), exponents_.end(), alpha);
    require(it != exponents_.end(), ErrorCode::InvalidArgument, "exponent vector does not match tensor order");
    return static_cast<std::size_t>(it - exponents_.begin());
  }

  T& at(const Exponents& alpha) { return values_[index_of(alpha)]; }
  const T& at(const Exponents& alpha) const { return values_[index_of(alpha)]; }

  /// Component for a 0-based index tuple such as {0, 0, 1, 1}.
  const T& at_indices(std::span<const int> indices) const { return at(to_exponents(indices)); }
  const T& at_indices(std::initializer_list<int> indices) const {
    return at_indices(std::span<const int>(indices.begin(), indices.size()));
  }

  Exponents to_exponents(std::span<const int> indices) const {
    require(static_cast<int>(indices.size()) == order_, ErrorCode::InvalidArgument, "index tuple length != order");
    Exponents alpha(dim_, 0);
    for (int i : indices) {
      require(i >= 0 && i < dim_, ErrorCode::InvalidArgument, "tensor index out of range");
      ++alpha[i];
    }
    return alpha;
  }

 private:
  int dim_ = 0;
  int order_ = 0;
  std::vector<Exponents> exponents_;
  std::vector<T> values_;
};

/// sum over all index tuples of a_{i1..ik} b_{i1..ik}.
template <class T>
T full_contraction(const SymmetricTensor<T>& a, const SymmetricTensor<T>& b) {
  require(a.dim() == b.dim() && a.order() == b.order(), ErrorCode::DimensionMismatch,
          "contraction of tensors with different shapes");
  T total(0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double m = multinomial(a.exponents()[i]);
    total += T(m) * a[i] * b[i];
  }
  return total;
}

/// Contracts one index pair: (tr a)_{alpha} = sum_i a_{alpha + 2 e_i}.
template <class T>
SymmetricTensor<T> trace(const SymmetricTensor<T>& a) {
  require(a.order() >= 2, ErrorCode::InvalidArgument, "trace needs order >= 2");
  SymmetricTensor<T> out(a.dim(), a.order() - 2);
  for (std::size_t j = 0; j < out.size(); ++j) {
    Exponents alpha = out.exponents()[j];
    T sum(0);
    for (int i = 0; i < a.dim(); ++i) {
      alpha[i] += 2;
      sum += a.at(alpha);
      alpha[i] -= 2;
    }
    out[j] = sum;
  }
  return out;
}

}  // namespace hlmax
