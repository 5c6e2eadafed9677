#include "hlmax/body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "hlmax/error.hpp"
#include "hull.hpp"

namespace hlmax {
namespace {

void check_dim(int dim) {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::Unsupported,
          "body dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
}

void check_positive(double v, const char* what) {
  require(std::isfinite(v) && v > 0.0, ErrorCode::Degenerate, std::string(what) + " must be positive and finite");
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double unit_ball_volume(int d) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
}

std::vector<Vec> dedupe(std::vector<Vec> vertices) {
  std::vector<Vec> out;
  for (auto& v : vertices) {
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Vec& w) { return w == v; });
    if (!dup) out.push_back(std::move(v));
  }
  return out;
}

void check_symmetric(const std::vector<Vec>& vertices) {
  double scale = 0.0;
  for (const auto& v : vertices) scale = std::max(scale, v.norm());
  for (const auto& v : vertices) {
    const bool paired = std::any_of(vertices.begin(), vertices.end(),
                                    [&](const Vec& w) { return (v + w).norm() <= 1e-12 * scale; });
    require(paired, ErrorCode::InvalidArgument, "V-polytope vertex set is not closed under negation");
  }
}

double polytope_volume(const VPolytope& p, int d) {
  double total = 0.0;
  for (const auto& simplex : p.fan) {
    Mat m(d, d);
    for (int j = 0; j < d; ++j) m.col(j) = p.vertices[simplex[j]];
    total += std::abs(m.determinant());
  }
  return total / factorial(d);
}

std::optional<std::pair<double, double>> clip(double lo, double hi, double nu, double slack) {
  // Intersect [lo, hi] with {t : nu * t <= slack}.
  if (nu == 0.0) {
    if (slack < 0.0) return std::nullopt;
    return std::make_pair(lo, hi);
  }
  const double t = slack / nu;
  if (nu > 0.0) hi = std::min(hi, t);
  else lo = std::max(lo, t);
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

bool is_scalar(const Mat& A, double& c) {
  c = A(0, 0);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (A(i, j) != (i == j ? c : 0.0)) return false;
  return true;
}

bool is_diagonal(const Mat& A) {
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      if (i != j && A(i, j) != 0.0) return false;
  return true;
}

void check_matrix(const Mat& A, int d, const LinearMapOptions& options) {
  require(A.rows() == d && A.cols() == d, ErrorCode::DimensionMismatch,
          "linear map must be " + std::to_string(d) + "x" + std::to_string(d));
  require(A.allFinite(), ErrorCode::Singular, "linear map has non-finite entries");
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  const double smax = s(0), smin = s(s.size() - 1);
  require(smin > 0.0, ErrorCode::Singular, "linear map is singular");
  require(smax / smin <= options.max_condition, ErrorCode::Singular,
          "linear map condition number " + std::to_string(smax / smin) + " exceeds cap " +
              std::to_string(options.max_condition));
}

}  // namespace

Body Body::ball(int dim, double radius) {
  check_dim(dim);
  check_positive(radius, "ball radius");
  auto exact = std::make_shared<ExactForm>(ExactForm{ExactBall{dim, rational_from_double(radius)}, 1.0});
  return Body(dim, Ball{radius}, std::move(exact));
}

Body Body::box(std::vector<double> half_widths) {
  const int dim = static_cast<int>(half_widths.size());
  check_dim(dim);
  ExactBox eb;
  Vec hw(dim);
  for (int i = 0; i < dim; ++i) {
    check_positive(half_widths[i], "box half-width");
    hw(i) = half_widths[i];
    eb.half_widths.push_back(rational_from_double(half_widths[i]));
  }
  return Body(dim, AxisBox{hw}, std::make_shared<ExactForm>(ExactForm{std::move(eb), 1.0}));
}

Body Body::cross(int dim, double scale) {
  check_dim(dim);
  check_positive(scale, "cross-polytope scale");
  auto exact = std::make_shared<ExactForm>(ExactForm{ExactCross{dim, rational_from_double(scale)}, 1.0});
  return Body(dim, CrossPolytope{scale}, std::move(exact));
}

Body Body::polytope(std::vector<Vec> vertices) {
  require(!vertices.empty(), ErrorCode::Degenerate, "V-polytope needs vertices");
  const int dim = static_cast<int>(vertices.front().size());
  check_dim(dim);
  for (const auto& v : vertices) {
    require(v.size() == dim, ErrorCode::DimensionMismatch, "V-polytope vertices have mixed dimensions");
    require(v.allFinite(), ErrorCode::InvalidArgument, "V-polytope vertex is not finite");
  }
  vertices = dedupe(std::move(vertices));
  check_symmetric(vertices);
  auto hull = detail::convex_hull(vertices);
  ExactPolytope ep{dim, {}, hull.fan};
  for (const auto& v : vertices) {
    std::vector<Rational> r;
    for (int i = 0; i < dim; ++i) r.push_back(rational_from_double(v(i)));
    ep.vertices.push_back(std::move(r));
  }
  VPolytope p{std::move(vertices), std::move(hull.facets), std::move(hull.fan)};
  require(polytope_volume(p, dim) > 0.0, ErrorCode::Degenerate, "V-polytope has zero volume");
  return Body(dim, std::move(p), std::make_shared<ExactForm>(ExactForm{std::move(ep), 1.0}));
}

Body Body::exact_ball(int dim, const Rational& radius) {
  check_dim(dim);
  require(radius > 0, ErrorCode::Degenerate, "ball radius must be positive");
  auto exact = std::make_shared<ExactForm>(ExactForm{ExactBall{dim, radius}, 1.0});
  return Body(dim, Ball{to_double(radius)}, std::move(exact));
}

Body Body::exact_box(const std::vector<Rational>& half_widths) {
  const int dim = static_cast<int>(half_widths.size());
  check_dim(dim);
  Vec hw(dim);
  for (int i = 0; i < dim; ++i) {
    require(half_widths[i] > 0, ErrorCode::Degenerate, "box half-width must be positive");
    hw(i) = to_double(half_widths[i]);
  }
  return Body(dim, AxisBox{hw}, std::make_shared<ExactForm>(ExactForm{ExactBox{half_widths}, 1.0}));
}

Body Body::exact_cross(int dim, const Rational& scale) {
  check_dim(dim);
  require(scale > 0, ErrorCode::Degenerate, "cross-polytope scale must be positive");
  auto exact = std::make_shared<ExactForm>(ExactForm{ExactCross{dim, scale}, 1.0});
  return Body(dim, CrossPolytope{to_double(scale)}, std::move(exact));
}

Body Body::exact_polytope(const std::vector<std::vector<Rational>>& vertices) {
  require(!vertices.empty(), ErrorCode::Degenerate, "V-polytope needs vertices");
  const int dim = static_cast<int>(vertices.front().size());
  check_dim(dim);
  std::vector<std::vector<Rational>> unique;
  for (const auto& v : vertices) {
    require(static_cast<int>(v.size()) == dim, ErrorCode::DimensionMismatch,
            "V-polytope vertices have mixed dimensions");
    if (std::find(unique.begin(), unique.end(), v) == unique.end()) unique.push_back(v);
  }
  for (const auto& v : unique) {
    std::vector<Rational> neg;
    for (const auto& c : v) neg.push_back(-c);
    require(std::find(unique.begin(), unique.end(), neg) != unique.end(), ErrorCode::InvalidArgument,
            "V-polytope vertex set is not closed under negation");
  }
  std::vector<Vec> floats;
  for (const auto& v : unique) {
    Vec f(dim);
    for (int i = 0; i < dim; ++i) f(i) = to_double(v[i]);
    floats.push_back(f);
  }
  auto hull = detail::convex_hull(floats);
  ExactPolytope ep{dim, unique, hull.fan};
  VPolytope p{std::move(floats), std::move(hull.facets), std::move(hull.fan)};
  require(polytope_volume(p, dim) > 0.0, ErrorCode::Degenerate, "V-polytope has zero volume");
  return Body(dim, std::move(p), std::make_shared<ExactForm>(ExactForm{std::move(ep), 1.0}));
}

std::string Body::kind() const {
  switch (shape_.index()) {
    case 0: return "ball";
    case 1: return "box";
    case 2: return "cross";
    case 3: return "vpolytope";
    default: return "linear_image";
  }
}

double volume(const Body& body) {
  const int d = body.dim();
  return std::visit(
      [d](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return unit_ball_volume(d) * std::pow(s.radius, d);
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return (2.0 * s.half_widths).prod();
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          return std::pow(2.0 * s.scale, d) / factorial(d);
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          return polytope_volume(s, d);
        } else {
          return s.abs_det * volume(*s.base);
        }
      },
      body.shape());
}

double gauge(const Body& body, const Vec& x) {
  require(x.size() == body.dim(), ErrorCode::DimensionMismatch,
          "point has dimension " + std::to_string(x.size()) + ", body has " + std::to_string(body.dim()));
  return std::visit(
      [&x](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return x.norm() / s.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return x.cwiseAbs().cwiseQuotient(s.half_widths).maxCoeff();
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          return x.cwiseAbs().sum() / s.scale;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double g = 0.0;
          for (const auto& f : s.facets) g = std::max(g, std::abs(f.normal.dot(x)) / f.offset);
          return g;
        } else {
          return gauge(*s.base, s.inverse * x);
        }
      },
      body.shape());
}

bool contains(const Body& body, const Vec& x) {
  require(x.size() == body.dim(), ErrorCode::DimensionMismatch,
          "point has dimension " + std::to_string(x.size()) + ", body has " + std::to_string(body.dim()));
  return std::visit(
      [&x](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return x.squaredNorm() <= s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          for (int i = 0; i < x.size(); ++i)
            if (std::abs(x(i)) > s.half_widths(i)) return false;
          return true;
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          return x.cwiseAbs().sum() <= s.scale;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          for (const auto& f : s.facets)
            if (std::abs(f.normal.dot(x)) > f.offset * (1.0 + 1e-12)) return false;
          return true;
        } else {
          return gauge(*s.base, s.inverse * x) <= 1.0 + 1e-12;
        }
      },
      body.shape());
}

double support(const Body& body, const Vec& u) {
  require(u.size() == body.dim(), ErrorCode::DimensionMismatch, "direction dimension mismatch");
  return std::visit(
      [&u](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s.radius * u.norm();
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return s.half_widths.dot(u.cwiseAbs());
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          return s.scale * u.cwiseAbs().maxCoeff();
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double h = -std::numeric_limits<double>::infinity();
          for (const auto& v : s.vertices) h = std::max(h, v.dot(u));
          return h;
        } else {
          return support(*s.base, s.matrix.transpose() * u);
        }
      },
      body.shape());
}

double support_radius(const Body& body) {
  return std::visit(
      [&body](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return s.radius;
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return s.half_widths.norm();
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          return s.scale;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          double r = 0.0;
          for (const auto& v : s.vertices) r = std::max(r, v.norm());
          return r;
        } else {
          if (const auto* b = s.base->template as<Ball>()) {
            return b->radius * Eigen::JacobiSVD<Mat>(s.matrix).singularValues()(0);
          }
          double r = 0.0;
          for (const auto& v : polytope_vertices(body)) r = std::max(r, v.norm());
          return r;
        }
      },
      body.shape());
}

std::optional<std::pair<double, double>> chord(const Body& body, const Vec& p, const Vec& u) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return std::visit(
      [&](const auto& s) -> std::optional<std::pair<double, double>> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          const double a = u.squaredNorm();
          const double b = p.dot(u);
          const double c = p.squaredNorm() - s.radius * s.radius;
          const double disc = b * b - a * c;
          if (disc < 0.0 || a == 0.0) {
            if (a == 0.0 && c <= 0.0) return std::make_pair(-inf, inf);
            return std::nullopt;
          }
          const double q = -(b + std::copysign(std::sqrt(disc), b));
          double t1 = q / a;
          double t2 = q != 0.0 ? c / q : -t1;
          if (t1 > t2) std::swap(t1, t2);
          return std::make_pair(t1, t2);
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          std::optional<std::pair<double, double>> r = std::make_pair(-inf, inf);
          for (int i = 0; i < p.size() && r; ++i) {
            r = clip(r->first, r->second, u(i), s.half_widths(i) - p(i));
            if (r) r = clip(r->first, r->second, -u(i), s.half_widths(i) + p(i));
          }
          return r;
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          const int d = static_cast<int>(p.size());
          std::optional<std::pair<double, double>> r = std::make_pair(-inf, inf);
          for (int mask = 0; mask < (1 << d) && r; ++mask) {
            double nu = 0.0, np = 0.0;
            for (int i = 0; i < d; ++i) {
              const double sign = (mask >> i) & 1 ? -1.0 : 1.0;
              nu += sign * u(i);
              np += sign * p(i);
            }
            r = clip(r->first, r->second, nu, s.scale - np);
          }
          return r;
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          std::optional<std::pair<double, double>> r = std::make_pair(-inf, inf);
          for (const auto& f : s.facets) {
            if (!r) break;
            r = clip(r->first, r->second, f.normal.dot(u), f.offset - f.normal.dot(p));
          }
          return r;
        } else {
          return chord(*s.base, s.inverse * p, s.inverse * u);
        }
      },
      body.shape());
}

Body scaled(const Body& body, double c) {
  check_positive(c, "scale factor");
  std::shared_ptr<const ExactForm> exact;
  if (body.exact()) {
    auto e = std::make_shared<ExactForm>(*body.exact());
    e->scale *= c;
    exact = std::move(e);
  }
  Body::Shape shape = std::visit(
      [&](const auto& s) -> Body::Shape {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return Ball{s.radius * c};
        } else if constexpr (std::is_same_v<T, AxisBox>) {
          return AxisBox{s.half_widths * c};
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          return CrossPolytope{s.scale * c};
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          VPolytope p = s;
          for (auto& v : p.vertices) v *= c;
          for (auto& f : p.facets) f.offset *= c;
          return p;
        } else {
          LinearImage li = s;
          li.matrix *= c;
          li.inverse /= c;
          li.abs_det *= std::pow(c, body.dim());
          return li;
        }
      },
      body.shape());
  return Body(body.dim(), std::move(shape), std::move(exact));
}

Body linear_map(const Body& body, const Mat& A, const LinearMapOptions& options) {
  const int d = body.dim();
  check_matrix(A, d, options);
  double c = 0.0;
  if (is_scalar(A, c)) return scaled(body, std::abs(c));

  if (const auto* box = body.as<AxisBox>(); box && is_diagonal(A)) {
    Vec hw = box->half_widths.cwiseProduct(A.diagonal().cwiseAbs());
    return Body(d, AxisBox{hw}, nullptr);
  }
  if (const auto* poly = body.as<VPolytope>()) {
    VPolytope p;
    for (const auto& v : poly->vertices) p.vertices.push_back(A * v);
    const Mat inv_t = A.inverse().transpose();
    for (const auto& f : poly->facets) {
      Vec n = inv_t * f.normal;
      const double len = n.norm();
      p.facets.push_back({n / len, f.offset / len});
    }
    p.fan = poly->fan;
    return Body(d, std::move(p), nullptr);
  }
  if (const auto* li = body.as<LinearImage>()) {
    const Mat composite = A * li->matrix;
    check_matrix(composite, d, options);
    return Body(d, LinearImage{li->base, composite, composite.inverse(), std::abs(composite.determinant())},
                nullptr);
  }
  auto base = std::make_shared<const Body>(body);
  return Body(d, LinearImage{std::move(base), A, A.inverse(), std::abs(A.determinant())}, nullptr);
}

Body linear_map_exact(const Body& body, const std::vector<Rational>& A, const LinearMapOptions& options) {
  const int d = body.dim();
  require(static_cast<int>(A.size()) == d * d, ErrorCode::DimensionMismatch, "exact matrix has wrong size");
  Mat M(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) M(i, j) = to_double(A[i * d + j]);
  Body mapped = linear_map(body, M, options);
  if (!body.exact()) return mapped;
  double c = 0.0;
  if (is_scalar(M, c) && mapped.exact()) return mapped;
  mapped.exact_ = std::make_shared<ExactForm>(ExactForm{ExactLinear{d, body.exact_shared(), A}, 1.0});
  return mapped;
}

std::vector<Vec> polytope_vertices(const Body& body) {
  const int d = body.dim();
  return std::visit(
      [d](const auto& s) -> std::vector<Vec> {
        using T = std::decay_t<decltype(s)>;
        std::vector<Vec> out;
        if constexpr (std::is_same_v<T, AxisBox>) {
          for (int mask = 0; mask < (1 << d); ++mask) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v(i) = ((mask >> i) & 1 ? -1.0 : 1.0) * s.half_widths(i);
            out.push_back(v);
          }
        } else if constexpr (std::is_same_v<T, CrossPolytope>) {
          for (int i = 0; i < d; ++i) {
            Vec v = Vec::Zero(d);
            v(i) = s.scale;
            out.push_back(v);
            out.push_back(-v);
          }
        } else if constexpr (std::is_same_v<T, VPolytope>) {
          out = s.vertices;
        } else if constexpr (std::is_same_v<T, LinearImage>) {
          for (const auto& v : polytope_vertices(*s.base)) out.push_back(s.matrix * v);
        }
        return out;
      },
      body.shape());
}

}  // namespace hlmax
