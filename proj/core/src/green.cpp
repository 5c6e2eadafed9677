#include "hlmax/green.hpp"

#include <cmath>
#include <map>

#include "hlmax/error.hpp"

namespace hlmax {
namespace {

// (alpha, beta) -> coef of x^alpha r^beta
using Expression = std::map<std::pair<Exponents, int>, long long>;

Expression differentiate(const Expression& e, int i) {
  Expression out;
  for (const auto& [key, c] : e) {
    const auto& [alpha, beta] = key;
    if (alpha[i] > 0) {
      Exponents a = alpha;
      --a[i];
      out[{a, beta}] += c * alpha[i];
    }
    if (beta != 0) {
      Exponents a = alpha;
      ++a[i];
      out[{a, beta - 2}] += c * beta;
    }
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

Expression derivative(int dim, const Exponents& alpha) {
  Expression e;
  e[{Exponents(dim, 0), 2 - dim}] = 1;
  for (int i = 0; i < dim; ++i)
    for (int k = 0; k < alpha[i]; ++k) e = differentiate(e, i);
  return e;
}

void check_args(int dim, int order, std::size_t point_size) {
  require(dim >= 3, ErrorCode::Unsupported, "Green coefficients need d >= 3");
  require(order == 4 || order == 6, ErrorCode::Unsupported, "Green coefficient order must be 4 or 6");
  require(static_cast<int>(point_size) == dim, ErrorCode::DimensionMismatch, "point dimension != d");
}

}  // namespace

GreenCoeffs green_coeffs(int dim, const Vec& point, int order) {
  check_args(dim, order, point.size());
  const double r = point.norm();
  require(r > 0.0, ErrorCode::InvalidArgument, "Green coefficients are undefined at the origin");
  GreenCoeffs g{dim, point, order, SymmetricTensor<double>(dim, order)};
  for (std::size_t k = 0; k < g.tensor.size(); ++k) {
    double sum = 0.0;
    for (const auto& [key, c] : derivative(dim, g.tensor.exponents()[k])) {
      const auto& [alpha, beta] = key;
      double term = static_cast<double>(c) * std::pow(r, beta);
      for (int i = 0; i < dim; ++i) term *= std::pow(point(i), alpha[i]);
      sum += term;
    }
    g.tensor[k] = sum;
  }
  return g;
}

ExactTensor exact_green_coeffs(int dim, const std::vector<Rational>& point, int order) {
  check_args(dim, order, point.size());
  Rational r2 = 0;
  for (const auto& x : point) r2 += x * x;
  require(r2 > 0, ErrorCode::InvalidArgument, "Green coefficients are undefined at the origin");

  // Odd powers of r are r^{beta-1} * r; r^{beta-1} is a power of r^2.
  Rational root;
  const bool rational_r = exact_sqrt(r2, root);
  ExactTensor out;
  out.coefficients = SymmetricTensor<Rational>(dim, order);
  const bool odd = dim % 2 == 1;
  if (odd && !rational_r) {
    out.factor = std::sqrt(to_double(r2));
    out.factor_note = "|p|";
  }
  auto r2_pow = [&](int e) {
    Rational v = 1;
    const Rational& base = e >= 0 ? r2 : Rational(1 / r2);
    for (int k = 0; k < std::abs(e); ++k) v *= base;
    return v;
  };
  for (std::size_t k = 0; k < out.coefficients.size(); ++k) {
    Rational sum = 0;
    for (const auto& [key, c] : derivative(dim, out.coefficients.exponents()[k])) {
      const auto& [alpha, beta] = key;
      Rational term(static_cast<long>(c));
      for (int i = 0; i < dim; ++i)
        for (int e = 0; e < alpha[i]; ++e) term *= point[i];
      if (beta % 2 == 0) {
        term *= r2_pow(beta / 2);
      } else {
        term *= r2_pow((beta - 1) / 2);
        if (rational_r) term *= root;
      }
      sum += term;
    }
    out.coefficients[k] = sum;
  }
  return out;
}

}  // namespace hlmax
