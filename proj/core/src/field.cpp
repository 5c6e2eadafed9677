#include "hlmax/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlmax/error.hpp"

namespace hlmax {

Grid Grid::cube(int dim, double lo, double hi, int n) {
  require(hi > lo, ErrorCode::InvalidArgument, "grid bounds must satisfy lo < hi");
  Grid g;
  g.dim = dim;
  g.origin = Vec::Constant(dim, lo);
  g.spacing = (hi - lo) / n;
  g.shape.assign(dim, n);
  g.validate();
  return g;
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int s : shape) n *= static_cast<std::size_t>(s);
  return n;
}

double Grid::cell_volume() const { return std::pow(spacing, dim); }

std::vector<std::size_t> Grid::strides() const {
  std::vector<std::size_t> s(dim, 1);
  for (int a = dim - 2; a >= 0; --a) s[a] = s[a + 1] * static_cast<std::size_t>(shape[a + 1]);
  return s;
}

std::vector<int> Grid::unravel(std::size_t index) const {
  std::vector<int> cell(dim);
  for (int a = dim - 1; a >= 0; --a) {
    cell[a] = static_cast<int>(index % shape[a]);
    index /= shape[a];
  }
  return cell;
}

std::size_t Grid::ravel(const std::vector<int>& cell) const {
  std::size_t idx = 0;
  for (int a = 0; a < dim; ++a) idx = idx * shape[a] + cell[a];
  return idx;
}

Vec Grid::center(const std::vector<int>& cell) const {
  Vec x(dim);
  for (int a = 0; a < dim; ++a) x(a) = origin(a) + (cell[a] + 0.5) * spacing;
  return x;
}

Vec Grid::center(std::size_t index) const { return center(unravel(index)); }

double Grid::diameter() const {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += std::pow(shape[a] * spacing, 2);
  return std::sqrt(s);
}

void Grid::validate() const {
  require(dim >= 1 && dim <= kMaxDim, ErrorCode::Unsupported, "grid dimension must be 1, 2 or 3");
  require(origin.size() == dim, ErrorCode::DimensionMismatch, "grid origin has wrong dimension");
  require(static_cast<int>(shape.size()) == dim, ErrorCode::DimensionMismatch, "grid shape has wrong dimension");
  require(std::isfinite(spacing) && spacing > 0.0, ErrorCode::InvalidArgument, "grid spacing must be positive");
  for (int s : shape) require(s >= 2, ErrorCode::InvalidArgument, "grid needs at least 2 cells per axis");
}

bool Grid::operator==(const Grid& o) const {
  return dim == o.dim && spacing == o.spacing && shape == o.shape && origin == o.origin;
}

ScalarField::ScalarField(Grid g, double fill) : grid(std::move(g)), values(grid.size(), fill) {}

ScalarField::ScalarField(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  require(values.size() == grid.size(), ErrorCode::GeometryMismatch, "field values do not match grid size");
}

double ScalarField::max() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }
double ScalarField::min() const { return values.empty() ? 0.0 : *std::min_element(values.begin(), values.end()); }

void ScalarField::validate() const {
  grid.validate();
  require(values.size() == grid.size(), ErrorCode::GeometryMismatch, "field values do not match grid size");
  for (double v : values)
    require(std::isfinite(v) && v >= 0.0, ErrorCode::InvalidArgument, "field values must be finite and >= 0");
}

void require_same_grid(const Grid& a, const Grid& b) {
  require(a == b, ErrorCode::GeometryMismatch, "fields have different grid geometry");
}

double lp_norm(const ScalarField& f, double p) {
  require(p > 1.0 && std::isfinite(p), ErrorCode::InvalidArgument, "L^p norm needs 1 < p < inf");
  const double m = f.max();
  if (m == 0.0) return 0.0;
  // Scale by the max so large p does not overflow.
  double s = 0.0;
  for (double v : f.values) s += std::pow(v / m, p);
  return m * std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

double superlevel_measure(const ScalarField& f, double mu) {
  require(mu > 0.0, ErrorCode::InvalidArgument, "superlevel threshold must be positive");
  std::size_t n = 0;
  for (double v : f.values) n += v >= mu;
  return static_cast<double>(n) * f.grid.cell_volume();
}

double layer_cake_integral(const ScalarField& f, double p) {
  require(p > 0.0, ErrorCode::InvalidArgument, "layer-cake exponent must be positive");
  std::vector<double> v;
  v.reserve(f.size());
  for (double x : f.values)
    if (x > 0.0) v.push_back(x);
  std::sort(v.begin(), v.end());
  double total = 0.0, prev = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    const double level = v[i];
    const double measure = static_cast<double>(v.size() - i) * f.grid.cell_volume();
    total += measure * (std::pow(level, p) - std::pow(prev, p));
    prev = level;
    while (i < v.size() && v[i] == level) ++i;
  }
  return total;
}

SignedField discrete_laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  for (int s : g.shape) require(s >= 3, ErrorCode::InvalidArgument, "Laplacian needs at least 3 cells per axis");
  SignedField out{g, std::vector<double>(f.size(), 0.0), std::vector<std::uint8_t>(f.size(), 0)};
  const auto stride = g.strides();
  const double inv_h2 = 1.0 / (g.spacing * g.spacing);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto cell = g.unravel(idx);
    bool interior = true;
    for (int a = 0; a < g.dim; ++a) interior = interior && cell[a] > 0 && cell[a] + 1 < g.shape[a];
    if (!interior) continue;
    double lap = 0.0;
    for (int a = 0; a < g.dim; ++a) lap += f[idx + stride[a]] - 2.0 * f[idx] + f[idx - stride[a]];
    out.values[idx] = lap * inv_h2;
    out.valid[idx] = 1;
  }
  return out;
}

DominanceReport dominates(const ScalarField& f, const ScalarField& g, double tol, const Region* region) {
  require_same_grid(f.grid, g.grid);
  if (region) require(region->size() == f.size(), ErrorCode::GeometryMismatch, "region does not match grid");
  DominanceReport r;
  r.worst_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (region && !(*region)[i]) continue;
    ++r.checked;
    const double margin = f[i] - g[i];
    if (margin < r.worst_margin) {
      r.worst_margin = margin;
      r.worst_cell = i;
    }
  }
  if (r.checked == 0) {
    r.worst_margin = 0.0;
    return r;
  }
  r.holds = r.worst_margin >= -tol;
  r.worst_point = f.grid.center(r.worst_cell);
  return r;
}

ScalarField sample(const Grid& grid, const std::function<double(const Vec&)>& fn) {
  ScalarField f(grid);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = fn(grid.center(i));
  return f;
}

ScalarField indicator(const Grid& grid, const Body& body, double scale, const Vec* center) {
  require(body.dim() == grid.dim, ErrorCode::DimensionMismatch, "body and grid dimensions differ");
  const Body k = scale == 1.0 ? body : scaled(body, scale);
  const Vec c = center ? *center : Vec::Zero(grid.dim);
  return sample(grid, [&](const Vec& x) { return contains(k, x - c) ? 1.0 : 0.0; });
}

ScalarField tent(const Grid& grid, const Body& body, double scale, const Vec* center) {
  require(body.dim() == grid.dim, ErrorCode::DimensionMismatch, "body and grid dimensions differ");
  const Vec c = center ? *center : Vec::Zero(grid.dim);
  return sample(grid, [&](const Vec& x) { return std::max(0.0, 1.0 - gauge(body, (x - c) / scale)); });
}

ScalarField two_bump(const Grid& grid, const Body& body, double scale, double offset, double second_height) {
  Vec c1 = Vec::Zero(grid.dim), c2 = Vec::Zero(grid.dim);
  c1(0) = -offset;
  c2(0) = offset;
  ScalarField a = tent(grid, body, scale, &c1);
  const ScalarField b = tent(grid, body, scale, &c2);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += second_height * b[i];
  return a;
}

Region body_region(const Grid& grid, const Body& body, double scale) {
  const Body k = scale == 1.0 ? body : scaled(body, scale);
  Region r(grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = contains(k, grid.center(i));
  return r;
}

Region annulus_region(const Grid& grid, double r_inner, double r_outer) {
  Region r(grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double n = grid.center(i).norm();
    r[i] = n >= r_inner && n <= r_outer;
  }
  return r;
}

Region window_region(const Grid& grid, const std::vector<int>& lo, const std::vector<int>& hi) {
  require(static_cast<int>(lo.size()) == grid.dim && static_cast<int>(hi.size()) == grid.dim,
          ErrorCode::DimensionMismatch, "window bounds have wrong dimension");
  Region r(grid.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto c = grid.unravel(i);
    bool in = true;
    for (int a = 0; a < grid.dim; ++a) in = in && c[a] >= lo[a] && c[a] < hi[a];
    r[i] = in;
  }
  return r;
}

std::size_t region_count(const Region& region) {
  return static_cast<std::size_t>(std::count(region.begin(), region.end(), 1));
}

}  // namespace hlmax
