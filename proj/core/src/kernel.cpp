#include "hlmax/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlmax/error.hpp"

namespace hlmax {
namespace {

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

// Overlap of [o - 1/2, o + 1/2] with [-L, L], in cell units.
double interval_overlap(int o, double L) { return std::max(0.0, std::min(o + 0.5, L) - std::max(o - 0.5, -L)); }

void build_box(const AxisBox& box, AveragingKernel& k) {
  k.separable = true;
  k.raw_total = 1.0;
  for (int a = 0; a < k.dim; ++a) {
    const double L = k.lambda * box.half_widths(a) / k.spacing;
    const int R = std::max(0, static_cast<int>(std::ceil(L + 0.5)) - 1);
    k.radius[a] = R;
    const int E = std::min(R, k.extent[a]);
    k.extent[a] = E;
    double full = 0.0;
    for (int o = -R; o <= R; ++o) full += interval_overlap(o, L);
    std::vector<double> w(2 * E + 1);
    for (int o = -E; o <= E; ++o) w[o + E] = interval_overlap(o, L);
    k.axis_raw.push_back(std::move(w));
    k.axis_total.push_back(full);
    k.raw_total *= full;
  }
}

// Sub-sample q along an axis sits at ((q + 1/2)/k - 1/2) h; cell o holds q in [o k, o k + k).
struct Rows {
  const Body& body;
  double lambda, h;
  int k, d;

  // Range of last-axis sub-sample indices inside lambda K on the line
  // through transverse point y.
  bool range(const Vec& y, long& qmin, long& qmax) const {
    Vec p = Vec::Zero(d), u = Vec::Zero(d);
    for (int a = 0; a + 1 < d; ++a) p(a) = y(a) / lambda;
    u(d - 1) = 1.0;
    const auto c = chord(body, p, u);
    if (!c) return false;
    const double t0 = c->first * lambda / h, t1 = c->second * lambda / h;
    qmin = static_cast<long>(std::ceil(k * (t0 + 0.5) - 0.5));
    qmax = static_cast<long>(std::floor(k * (t1 + 0.5) - 0.5));
    return qmax >= qmin;
  }
};

void build_sampled(const Body& body, int ss, AveragingKernel& k) {
  const int d = k.dim;
  k.supersample = ss;
  for (int a = 0; a < d; ++a) {
    Vec e = Vec::Zero(d);
    e(a) = 1.0;
    const double reach = k.lambda * support(body, e) / k.spacing;
    k.radius[a] = std::max(0, static_cast<int>(std::ceil(reach + 0.5)) - 1);
    k.extent[a] = std::min(k.radius[a], k.extent[a]);
  }
  const auto shape = k.block_shape();
  k.counts.assign(k.block_size(), 0);
  std::vector<std::size_t> stride(d, 1);
  for (int a = d - 2; a >= 0; --a) stride[a] = stride[a + 1] * shape[a + 1];

  const Rows rows{body, k.lambda, k.spacing, ss, d};
  const int t = d - 1;  // transverse axes
  std::vector<long> q(t), qlo(t), qhi(t);
  for (int a = 0; a < t; ++a) {
    qlo[a] = -static_cast<long>(k.radius[a]) * ss;
    qhi[a] = static_cast<long>(k.radius[a]) * ss + ss - 1;
    q[a] = qlo[a];
  }
  const long E = k.extent[d - 1];
  long total = 0;
  while (true) {
    Vec y(std::max(t, 1));
    bool stored = true;
    std::size_t base = 0;
    for (int a = 0; a < t; ++a) {
      y(a) = ((q[a] + 0.5) / ss - 0.5) * k.spacing;
      const long o = floor_div(q[a], ss);
      stored = stored && std::abs(o) <= k.extent[a];
      if (stored) base += static_cast<std::size_t>(o + k.extent[a]) * stride[a];
    }
    long qmin, qmax;
    if (rows.range(y, qmin, qmax)) {
      total += qmax - qmin + 1;
      if (stored) {
        const long lo = std::max(qmin, -E * ss), hi = std::min(qmax, E * ss + ss - 1);
        for (long o = floor_div(lo, ss); lo <= hi && o <= floor_div(hi, ss); ++o) {
          const long a = std::max(lo, o * ss), b = std::min(hi, o * ss + ss - 1);
          k.counts[base + static_cast<std::size_t>(o + E)] += static_cast<std::uint8_t>(b - a + 1);
        }
      }
    }
    int a = t - 1;
    while (a >= 0 && ++q[a] > qhi[a]) {
      q[a] = qlo[a];
      --a;
    }
    if (a < 0) break;
  }
  k.raw_total = static_cast<double>(total) / std::pow(ss, d);
}

}  // namespace

std::size_t AveragingKernel::block_size() const {
  std::size_t n = 1;
  for (int e : extent) n *= static_cast<std::size_t>(2 * e + 1);
  return n;
}

std::vector<int> AveragingKernel::block_shape() const {
  std::vector<int> s(dim);
  for (int a = 0; a < dim; ++a) s[a] = 2 * extent[a] + 1;
  return s;
}

double AveragingKernel::raw_at(std::size_t flat) const {
  if (!separable) return counts[flat] / std::pow(supersample, dim);
  double w = 1.0;
  for (int a = dim - 1; a >= 0; --a) {
    const std::size_t n = 2 * extent[a] + 1;
    w *= axis_raw[a][flat % n];
    flat /= n;
  }
  return w;
}

std::vector<KernelEntry> AveragingKernel::entries() const {
  std::vector<KernelEntry> out;
  const auto shape = block_shape();
  const std::size_t n = block_size();
  for (std::size_t flat = 0; flat < n; ++flat) {
    const double r = raw_at(flat);
    if (r <= 0.0) continue;
    std::vector<int> o(dim);
    std::size_t rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      o[a] = static_cast<int>(rest % shape[a]) - extent[a];
      rest /= shape[a];
    }
    out.push_back({std::move(o), r, r / raw_total});
  }
  return out;
}

AveragingKernel build_kernel(const Body& body, double lambda, double spacing, const KernelOptions& options) {
  const int d = body.dim();
  require(spacing > 0.0 && std::isfinite(spacing), ErrorCode::InvalidArgument, "spacing must be positive");
  require(std::isfinite(lambda) && lambda >= spacing * (1.0 - 1e-12), ErrorCode::InvalidArgument,
          "dilation " + std::to_string(lambda) + " is below the grid spacing " + std::to_string(spacing));
  require(options.max_offset.empty() || static_cast<int>(options.max_offset.size()) == d,
          ErrorCode::DimensionMismatch, "max_offset has wrong dimension");

  AveragingKernel k;
  k.dim = d;
  k.lambda = lambda;
  k.spacing = spacing;
  k.radius.assign(d, 0);
  k.extent.assign(d, std::numeric_limits<int>::max());
  if (!options.max_offset.empty()) k.extent = options.max_offset;

  if (const auto* box = body.as<AxisBox>()) {
    build_box(*box, k);
  } else {
    require(options.supersample >= 1 && options.supersample <= 6, ErrorCode::InvalidArgument,
            "supersample factor must be in 1..6");
    build_sampled(body, options.supersample, k);
  }
  require(k.raw_total > 0.0, ErrorCode::Numerical, "kernel covers no sub-samples; refine the grid");

  double stored = 0.0;
  for (std::size_t i = 0; i < k.block_size(); ++i) stored += k.raw_at(i);
  k.weight_sum = stored / k.raw_total;
  const double vol = volume(body) * std::pow(lambda, d);
  k.discretization_bound = std::abs(k.raw_total * std::pow(spacing, d) - vol) / vol;
  return k;
}

std::vector<double> DilationLadder::values() const {
  require(lambda_min > 0.0 && lambda_max >= lambda_min, ErrorCode::InvalidArgument,
          "ladder needs 0 < lambda_min <= lambda_max");
  require(ratio > 1.0, ErrorCode::InvalidArgument, "ladder ratio must exceed 1");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = lambda_min * std::pow(ratio, k);
    if (v >= lambda_max * (1.0 - 1e-12)) break;
    out.push_back(v);
  }
  out.push_back(lambda_max);
  return out;
}

void DilationLadder::validate(const Grid& grid) const {
  require(lambda_min >= grid.spacing * (1.0 - 1e-12), ErrorCode::InvalidArgument,
          "lambda_min must be at least the grid spacing");
  require(lambda_max >= lambda_min, ErrorCode::InvalidArgument, "lambda_max must be at least lambda_min");
  require(lambda_max <= grid.diameter() * (1.0 + 1e-12), ErrorCode::DomainTooSmall,
          "lambda_max " + std::to_string(lambda_max) + " exceeds the domain diameter " +
              std::to_string(grid.diameter()));
  require(ratio > 1.0 && ratio <= 1.2, ErrorCode::InvalidArgument, "ladder ratio must lie in (1, 1.2]");
}

double DilationLadder::sup_gap_bound(int dim) const { return std::pow(ratio, dim) - 1.0; }

DilationLadder DilationLadder::for_grid(const Grid& grid, double ratio) {
  return {grid.spacing, grid.diameter(), ratio};
}

}  // namespace hlmax
