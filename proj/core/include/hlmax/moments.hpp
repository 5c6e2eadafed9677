#pragma once

#include <optional>
#include <string>

#include "hlmax/body.hpp"
#include "hlmax/rational.hpp"
#include "hlmax/symtensor.hpp"

namespace hlmax {

/// Component alpha holds the monomial integral of x^alpha over the body.
using MomentTensor = SymmetricTensor<double>;

/// Exact tensor in the form `factor * coefficients`, where the coefficients
/// are rational and `factor > 0` carries every irrational contribution (powers
/// of pi for balls, powers of a floating scale). Its sign and zero pattern are
/// therefore exactly those of the coefficients.
struct ExactTensor {
  SymmetricTensor<Rational> coefficients;
  double factor = 1.0;
  std::string factor_note;

  SymmetricTensor<double> to_double() const;
};

inline constexpr int kMaxMomentOrder = 6;

MomentTensor moment_tensor(const Body& body, int order);

/// Available when the body carries an exact form.
std::optional<ExactTensor> exact_moment_tensor(const Body& body, int order);

/// Order-2 moments as a d x d matrix.
Mat second_moment_matrix(const Body& body);

/// Moments of A K given moments of K.
MomentTensor push_forward(const MomentTensor& moments, const Mat& A);

struct IsotropizeOptions {
  double max_condition = 1e12;
};

struct Isotropized {
  Body body;
  Mat normalizer;
};

/// Returns A K with identity second moments, where A is the symmetric
/// positive-definite normalizer c * M2^{-1/2}.
Isotropized isotropize(const Body& body, const IsotropizeOptions& options = {});

/// Largest entry-wise deviation of the order-2 moments from the identity.
double isotropy_defect(const Body& body);

}  // namespace hlmax
