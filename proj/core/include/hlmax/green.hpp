#pragma once

#include <optional>
#include <vector>

#include "hlmax/body.hpp"
#include "hlmax/moments.hpp"
#include "hlmax/rational.hpp"
#include "hlmax/symtensor.hpp"

namespace hlmax {

/// Derivative tensor of h(x) = |x|^{2-d} at `point`.
struct GreenCoeffs {
  int dim = 0;
  Vec point;
  int order = 0;
  SymmetricTensor<double> tensor;
};

/// d >= 3, order 4 or 6, point away from the origin. Any dimension >= 3 is
/// accepted here; only the bodies are capped at 3.
GreenCoeffs green_coeffs(int dim, const Vec& point, int order);

/// Same tensor as rational coefficients times a positive factor (|point| when
/// d is odd and |point|^2 is not a square, else 1).
ExactTensor exact_green_coeffs(int dim, const std::vector<Rational>& point, int order);

inline Vec default_green_point(int dim) {
  Vec p = Vec::Zero(dim);
  p(0) = 3.0;
  return p;
}

}  // namespace hlmax
