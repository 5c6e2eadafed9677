#include "hull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hlmax/error.hpp"

namespace hlmax::detail {
namespace {

double cross2(const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

// Andrew's monotone chain; returns indices into `pts` in counter-clockwise
// order, dropping collinear points.
std::vector<int> chain_2d(const std::vector<Eigen::Vector2d>& pts, double tol) {
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (pts[a].x() != pts[b].x()) return pts[a].x() < pts[b].x();
    return pts[a].y() < pts[b].y();
  });
  std::vector<int> hull(2 * order.size() + 1);
  std::size_t k = 0;
  for (int idx : order) {
    while (k >= 2 && cross2(pts[hull[k - 2]], pts[hull[k - 1]], pts[idx]) <= tol) --k;
    hull[k++] = idx;
  }
  const std::size_t lower = k + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    while (k >= lower && cross2(pts[hull[k - 2]], pts[hull[k - 1]], pts[*it]) <= tol) --k;
    hull[k++] = *it;
  }
  hull.resize(k > 0 ? k - 1 : 0);
  return hull;
}

Hull hull_1d(const std::vector<Vec>& points) {
  int hi = 0, lo = 0;
  for (int i = 0; i < static_cast<int>(points.size()); ++i) {
    if (points[i](0) > points[hi](0)) hi = i;
    if (points[i](0) < points[lo](0)) lo = i;
  }
  if (!(points[hi](0) > 0.0) || !(points[lo](0) < 0.0)) fail(ErrorCode::Degenerate, "1-D polytope has zero length");
  Hull h;
  h.facets.push_back({Vec::Constant(1, 1.0), points[hi](0)});
  h.facets.push_back({Vec::Constant(1, -1.0), -points[lo](0)});
  h.fan = {{hi}, {lo}};
  return h;
}

Hull hull_2d(const std::vector<Vec>& points, double scale) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.emplace_back(p(0), p(1));
  const auto ring = chain_2d(pts, 1e-12 * scale * scale);
  if (ring.size() < 3) fail(ErrorCode::Degenerate, "2-D polytope has zero area");
  Hull h;
  for (std::size_t i = 0; i < ring.size(); ++i) {
    const int a = ring[i];
    const int b = ring[(i + 1) % ring.size()];
    Eigen::Vector2d edge = pts[b] - pts[a];
    Vec n(2);
    n << edge.y(), -edge.x();
    n.normalize();
    const double offset = n.dot(points[a]);
    if (!(offset > 1e-12 * scale)) fail(ErrorCode::Degenerate, "origin is not interior to the polytope");
    h.facets.push_back({n, offset});
    h.fan.push_back({a, b});
  }
  return h;
}

Hull hull_3d(const std::vector<Vec>& points, double scale) {
  const int n = static_cast<int>(points.size());
  const double tol = 1e-10 * scale;
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.emplace_back(p(0), p(1), p(2));

  struct Plane {
    Eigen::Vector3d normal;
    double offset;
  };
  std::vector<Plane> planes;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      for (int k = j + 1; k < n; ++k) {
        Eigen::Vector3d normal = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        const double len = normal.norm();
        if (len <= 1e-12 * scale * scale) continue;
        normal /= len;
        double offset = normal.dot(pts[i]);
        double lo = 0.0, hi = 0.0;
        for (const auto& p : pts) {
          const double s = normal.dot(p) - offset;
          lo = std::min(lo, s);
          hi = std::max(hi, s);
        }
        if (hi <= tol && lo >= -tol) fail(ErrorCode::Degenerate, "3-D polytope vertices are coplanar");
        if (lo >= -tol) {
          normal = -normal;
          offset = -offset;
        } else if (hi > tol) {
          continue;
        }
        const bool seen = std::any_of(planes.begin(), planes.end(), [&](const Plane& q) {
          return (q.normal - normal).norm() <= 1e-9 && std::abs(q.offset - offset) <= tol;
        });
        if (!seen) planes.push_back({normal, offset});
      }
    }
  }
  if (planes.size() < 4) fail(ErrorCode::Degenerate, "3-D polytope has zero volume");

  Hull h;
  for (const auto& plane : planes) {
    if (!(plane.offset > tol)) fail(ErrorCode::Degenerate, "origin is not interior to the polytope");
    std::vector<int> on;
    for (int i = 0; i < n; ++i) {
      if (std::abs(plane.normal.dot(pts[i]) - plane.offset) <= tol) on.push_back(i);
    }
    int far = on[1];
    for (int idx : on)
      if ((pts[idx] - pts[on[0]]).norm() > (pts[far] - pts[on[0]]).norm()) far = idx;
    Eigen::Vector3d e1 = (pts[far] - pts[on[0]]).normalized();
    Eigen::Vector3d e2 = plane.normal.cross(e1);
    std::vector<Eigen::Vector2d> local;
    for (int idx : on) {
      const Eigen::Vector3d r = pts[idx] - pts[on[0]];
      local.emplace_back(r.dot(e1), r.dot(e2));
    }
    const auto ring = chain_2d(local, 1e-12 * scale * scale);
    if (ring.size() < 3) continue;
    for (std::size_t t = 1; t + 1 < ring.size(); ++t) {
      h.fan.push_back({on[ring[0]], on[ring[t]], on[ring[t + 1]]});
    }
    Vec normal(3);
    normal << plane.normal.x(), plane.normal.y(), plane.normal.z();
    h.facets.push_back({normal, plane.offset});
  }
  return h;
}

}  // namespace

Hull convex_hull(const std::vector<Vec>& points) {
  if (points.empty()) fail(ErrorCode::Degenerate, "polytope needs vertices");
  const int d = static_cast<int>(points.front().size());
  double scale = 0.0;
  for (const auto& p : points) {
    if (p.size() != d) fail(ErrorCode::DimensionMismatch, "polytope vertices have mixed dimensions");
    scale = std::max(scale, p.norm());
  }
  if (!(scale > 0.0)) fail(ErrorCode::Degenerate, "polytope vertices are all at the origin");
  switch (d) {
    case 1: return hull_1d(points);
    case 2: return hull_2d(points, scale);
    case 3: return hull_3d(points, scale);
    default: fail(ErrorCode::Unsupported, "polytopes are supported in dimensions 1 to 3");
  }
}

}  // namespace hlmax::detail
