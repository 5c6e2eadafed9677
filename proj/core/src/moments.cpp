#include "hlmax/moments.hpp"

#include <cmath>
#include <numbers>

#include "hlmax/error.hpp"
#include "polynomial.hpp"

namespace hlmax {
namespace {

using detail::factorial_t;

void check_order(int order) {
  require(order >= 2 && order <= kMaxMomentOrder && order % 2 == 0, ErrorCode::Unsupported,
          "moment order must be 2, 4 or 6 (got " + std::to_string(order) + ")");
}

bool has_odd(const Exponents& alpha) {
  for (int a : alpha)
    if (a % 2 != 0) return true;
  return false;
}

template <class T>
T power(const T& base, int n) {
  T r(1);
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

// (n-1)!! / 2^{n/2} for even n: Gamma((n+1)/2) / sqrt(pi).
template <class T>
T half_gamma_even(int n) {
  T r(1);
  for (int k = n - 1; k > 0; k -= 2) r *= T(k);
  for (int k = 0; k < n / 2; ++k) r /= T(2);
  return r;
}

// Ball moments without the pi^{floor(d/2)} factor.
template <class T>
T ball_coefficient(const T& radius, int d, const Exponents& alpha) {
  if (has_odd(alpha)) return T(0);
  int k = 0;
  T num(1);
  for (int a : alpha) {
    num *= half_gamma_even<T>(a);
    k += a;
  }
  const int twice = k + d;  // Gamma(twice/2 + 1)
  T denom(1);
  if (twice % 2 == 0) {
    denom = factorial_t<T>(twice / 2);
  } else {
    const int n = (twice + 1) / 2;  // Gamma(n + 1/2) / sqrt(pi) = (2n-1)!! / 2^n
    for (int j = 2 * n - 1; j > 0; j -= 2) denom *= T(j);
    for (int j = 0; j < n; ++j) denom /= T(2);
  }
  return power(radius, d + k) * num / denom;
}

template <class T>
T box_moment(const std::vector<T>& hw, const Exponents& alpha) {
  if (has_odd(alpha)) return T(0);
  T r(1);
  for (std::size_t i = 0; i < hw.size(); ++i) r *= T(2) * power(hw[i], alpha[i] + 1) / T(alpha[i] + 1);
  return r;
}

template <class T>
T cross_moment(const T& s, int d, const Exponents& alpha) {
  if (has_odd(alpha)) return T(0);
  int k = 0;
  T num(1);
  for (int a : alpha) {
    num *= factorial_t<T>(a);
    k += a;
  }
  return power(s, d + k) * power(T(2), d) * num / factorial_t<T>(k + d);
}

double pi_factor(int d) { return std::pow(std::numbers::pi, d / 2); }

MomentTensor float_moments(const Body& body, int order) {
  const int d = body.dim();
  MomentTensor out(d, order);
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = pi_factor(d) * ball_coefficient<double>(s.radius, d, out.exponents()[k]);
        } else if constexpr (std::is_same_v<S, AxisBox>) {
          std::vector<double> hw(s.half_widths.data(), s.half_widths.data() + d);
          for (std::size_t k = 0; k < out.size(); ++k) out[k] = box_moment(hw, out.exponents()[k]);
        } else if constexpr (std::is_same_v<S, CrossPolytope>) {
          for (std::size_t k = 0; k < out.size(); ++k) out[k] = cross_moment(s.scale, d, out.exponents()[k]);
        } else if constexpr (std::is_same_v<S, VPolytope>) {
          std::vector<std::vector<double>> verts;
          for (const auto& v : s.vertices) verts.emplace_back(v.data(), v.data() + d);
          for (const auto& simplex : s.fan) detail::add_simplex_moments(verts, simplex, d, out);
        } else {
          out = push_forward(float_moments(*s.base, order), s.matrix);
        }
      },
      body.shape());
  return out;
}

ExactTensor exact_moments(const ExactForm& form, int order) {
  ExactTensor result;
  int d = 0;
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, ExactBall>) {
          d = s.dim;
          result.coefficients = SymmetricTensor<Rational>(d, order);
          for (std::size_t k = 0; k < result.coefficients.size(); ++k)
            result.coefficients[k] = ball_coefficient<Rational>(s.radius, d, result.coefficients.exponents()[k]);
          result.factor = pi_factor(d);
          if (d >= 2) result.factor_note = d / 2 == 1 ? "pi" : "pi^" + std::to_string(d / 2);
        } else if constexpr (std::is_same_v<S, ExactBox>) {
          d = static_cast<int>(s.half_widths.size());
          result.coefficients = SymmetricTensor<Rational>(d, order);
          for (std::size_t k = 0; k < result.coefficients.size(); ++k)
            result.coefficients[k] = box_moment(s.half_widths, result.coefficients.exponents()[k]);
        } else if constexpr (std::is_same_v<S, ExactCross>) {
          d = s.dim;
          result.coefficients = SymmetricTensor<Rational>(d, order);
          for (std::size_t k = 0; k < result.coefficients.size(); ++k)
            result.coefficients[k] = cross_moment(s.scale, d, result.coefficients.exponents()[k]);
        } else if constexpr (std::is_same_v<S, ExactPolytope>) {
          d = s.dim;
          result.coefficients = SymmetricTensor<Rational>(d, order);
          for (const auto& simplex : s.fan) detail::add_simplex_moments(s.vertices, simplex, d, result.coefficients);
        } else {
          d = s.dim;
          ExactTensor base = exact_moments(*s.base, order);
          result.coefficients = detail::push_forward_t(base.coefficients, s.matrix, d);
          result.factor = base.factor;
          result.factor_note = base.factor_note;
        }
      },
      form.shape);
  if (form.scale != 1.0) {
    result.factor *= std::pow(form.scale, d + order);
    std::string note = "scale^" + std::to_string(d + order);
    result.factor_note = result.factor_note.empty() ? note : result.factor_note + " * " + note;
  }
  return result;
}

}  // namespace

SymmetricTensor<double> ExactTensor::to_double() const {
  SymmetricTensor<double> out(coefficients.dim(), coefficients.order());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = hlmax::to_double(coefficients[k]) * factor;
  return out;
}

MomentTensor moment_tensor(const Body& body, int order) {
  check_order(order);
  return float_moments(body, order);
}

std::optional<ExactTensor> exact_moment_tensor(const Body& body, int order) {
  check_order(order);
  if (!body.exact()) return std::nullopt;
  return exact_moments(*body.exact(), order);
}

Mat second_moment_matrix(const Body& body) {
  const int d = body.dim();
  const auto m = moment_tensor(body, 2);
  Mat S(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) S(i, j) = m.at_indices({i, j});
  return S;
}

MomentTensor push_forward(const MomentTensor& moments, const Mat& A) {
  const int d = moments.dim();
  require(A.rows() == d && A.cols() == d, ErrorCode::DimensionMismatch, "push-forward matrix has wrong size");
  std::vector<double> a(d * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a[i * d + j] = A(i, j);
  return detail::push_forward_t(moments, a, d);
}

double isotropy_defect(const Body& body) {
  const Mat S = second_moment_matrix(body);
  return (S - Mat::Identity(body.dim(), body.dim())).cwiseAbs().maxCoeff();
}

Isotropized isotropize(const Body& body, const IsotropizeOptions& options) {
  const int d = body.dim();
  const Mat I = Mat::Identity(d, d);

  // A scalar second-moment matrix keeps the body's variant and exact form.
  bool scalar = false;
  double m = 0.0;
  if (const auto exact = exact_moment_tensor(body, 2)) {
    const auto& c = exact->coefficients;
    scalar = true;
    const Rational& diag = c.at_indices({0, 0});
    for (int i = 0; i < d && scalar; ++i)
      for (int j = 0; j < d && scalar; ++j)
        if (c.at_indices({i, j}) != (i == j ? diag : Rational(0))) scalar = false;
    m = to_double(diag) * exact->factor;
  } else {
    const Mat S = second_moment_matrix(body);
    scalar = S.isDiagonal(0.0) && (S.diagonal().array() == S(0, 0)).all();
    m = S(0, 0);
  }
  require(m > 0.0 || !scalar, ErrorCode::Degenerate, "second moments vanish");

  if (scalar) {
    const double c = std::pow(m, -1.0 / (d + 2));
    if (std::abs(c - 1.0) <= 8 * std::numeric_limits<double>::epsilon()) return {body, I};
    return {scaled(body, c), c * I};
  }

  const Mat S = second_moment_matrix(body);
  Eigen::SelfAdjointEigenSolver<Mat> eig(S);
  const auto& lambda = eig.eigenvalues();
  require(lambda.minCoeff() > 0.0, ErrorCode::Degenerate, "second-moment matrix is not positive definite");
  const double cond = lambda.maxCoeff() / lambda.minCoeff();
  require(cond <= options.max_condition, ErrorCode::IllConditioned,
          "second-moment condition number " + std::to_string(cond) + " exceeds cap");
  const Mat inv_sqrt = eig.eigenvectors() * lambda.cwiseInverse().cwiseSqrt().asDiagonal() *
                       eig.eigenvectors().transpose();
  const double c = std::pow(S.determinant(), 1.0 / (2.0 * (d + 2)));
  Mat A = c * inv_sqrt;
  A = 0.5 * (A + A.transpose());
  if ((A - I).cwiseAbs().maxCoeff() <= 1e-14) return {body, I};
  LinearMapOptions lm;
  lm.max_condition = std::max(lm.max_condition, std::sqrt(options.max_condition) * 10.0);
  return {linear_map(body, A, lm), A};
}

}  // namespace hlmax
