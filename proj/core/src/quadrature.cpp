#include "hlmax/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "hlmax/error.hpp"

namespace hlmax {
namespace {

// Gauss rule mapped to [a, b].
GaussRule mapped(const GaussRule& g, double a, double b) {
  GaussRule out = g;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    out.nodes[i] = mid + half * g.nodes[i];
    out.weights[i] = half * g.weights[i];
  }
  return out;
}

void box_rule(const GaussRule& g, const Vec& hw, BodyRule& out) {
  const int d = static_cast<int>(hw.size());
  std::vector<GaussRule> axes;
  for (int a = 0; a < d; ++a) axes.push_back(mapped(g, -hw(a), hw(a)));
  const std::size_t n = g.nodes.size();
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Vec p(d);
    double w = 1.0;
    for (int a = 0; a < d; ++a) {
      p(a) = axes[a].nodes[idx[a]];
      w *= axes[a].weights[idx[a]];
    }
    out.points.push_back(std::move(p));
    out.weights.push_back(w);
    int a = 0;
    while (a < d && ++idx[a] == n) idx[a++] = 0;
    if (a == d) break;
  }
}

void ball_rule(const GaussRule& g, int d, double radius, BodyRule& out) {
  const auto rr = mapped(g, 0.0, radius);
  constexpr double pi = std::numbers::pi;
  if (d == 1) {
    box_rule(g, Vec::Constant(1, radius), out);
    return;
  }
  const auto phi = mapped(g, 0.0, 2.0 * pi);
  if (d == 2) {
    for (std::size_t i = 0; i < rr.nodes.size(); ++i)
      for (std::size_t k = 0; k < phi.nodes.size(); ++k) {
        Vec p(2);
        p << rr.nodes[i] * std::cos(phi.nodes[k]), rr.nodes[i] * std::sin(phi.nodes[k]);
        out.points.push_back(std::move(p));
        out.weights.push_back(rr.weights[i] * phi.weights[k] * rr.nodes[i]);
      }
    return;
  }
  // cos(theta) in [-1, 1] removes the sin(theta) Jacobian.
  const auto& ct = g;
  for (std::size_t i = 0; i < rr.nodes.size(); ++i)
    for (std::size_t j = 0; j < ct.nodes.size(); ++j) {
      const double c = ct.nodes[j], s = std::sqrt(1.0 - c * c);
      for (std::size_t k = 0; k < phi.nodes.size(); ++k) {
        const double r = rr.nodes[i];
        Vec p(3);
        p << r * s * std::cos(phi.nodes[k]), r * s * std::sin(phi.nodes[k]), r * c;
        out.points.push_back(std::move(p));
        out.weights.push_back(rr.weights[i] * ct.weights[j] * phi.weights[k] * r * r);
      }
    }
}

// Collapsed coordinates on conv(0, v_1, ..., v_d).
void simplex_rule(const GaussRule& g01, const std::vector<Vec>& v, BodyRule& out) {
  const int d = static_cast<int>(v.size());
  Mat V(d, d);
  for (int j = 0; j < d; ++j) V.col(j) = v[j];
  const double jac = std::abs(V.determinant());
  const std::size_t n = g01.nodes.size();
  std::vector<std::size_t> idx(d, 0);
  while (true) {
    Vec t(d);
    double rest = 1.0, w = jac;
    for (int a = 0; a < d; ++a) {
      const double u = g01.nodes[idx[a]];
      t(a) = rest * u;
      w *= g01.weights[idx[a]] * rest;
      rest *= 1.0 - u;
    }
    out.points.push_back(V * t);
    out.weights.push_back(w);
    int a = 0;
    while (a < d && ++idx[a] == n) idx[a++] = 0;
    if (a == d) break;
  }
}

std::vector<std::vector<Vec>> cross_fan(int d, double s) {
  std::vector<std::vector<Vec>> fan;
  for (int mask = 0; mask < (1 << d); ++mask) {
    std::vector<Vec> simplex;
    for (int i = 0; i < d; ++i) {
      Vec e = Vec::Zero(d);
      e(i) = (mask >> i & 1) ? -s : s;
      simplex.push_back(e);
    }
    fan.push_back(std::move(simplex));
  }
  return fan;
}

void build(const Body& body, const GaussRule& g, BodyRule& out) {
  const int d = body.dim();
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, Ball>) {
          ball_rule(g, d, s.radius, out);
        } else if constexpr (std::is_same_v<S, AxisBox>) {
          box_rule(g, s.half_widths, out);
        } else if constexpr (std::is_same_v<S, CrossPolytope>) {
          const auto g01 = mapped(g, 0.0, 1.0);
          for (const auto& simplex : cross_fan(d, s.scale)) simplex_rule(g01, simplex, out);
        } else if constexpr (std::is_same_v<S, VPolytope>) {
          const auto g01 = mapped(g, 0.0, 1.0);
          for (const auto& f : s.fan) {
            std::vector<Vec> simplex;
            for (int idx : f) simplex.push_back(s.vertices[idx]);
            simplex_rule(g01, simplex, out);
          }
        } else {
          BodyRule base;
          build(*s.base, g, base);
          for (std::size_t i = 0; i < base.points.size(); ++i) {
            out.points.push_back(s.matrix * base.points[i]);
            out.weights.push_back(base.weights[i] * s.abs_det);
          }
        }
      },
      body.shape());
}

}  // namespace

GaussRule gauss_legendre(int n) {
  require(n >= 1, ErrorCode::InvalidArgument, "Gauss rule needs n >= 1");
  GaussRule g{std::vector<double>(n), std::vector<double>(n)};
  constexpr double pi = std::numbers::pi;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[n - 1 - i] = x;
    g.weights[i] = g.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

BodyRule body_rule(const Body& body, int n) {
  BodyRule out;
  build(body, gauss_legendre(n), out);
  return out;
}

double integrate(const BodyRule& rule, const std::function<double(const Vec&)>& g) {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const double y = rule.weights[i] * g(rule.points[i]) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace hlmax
