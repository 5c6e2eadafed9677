#include "hlmax/maxop.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>

#include "hlmax/error.hpp"
#include "parallel.hpp"

namespace hlmax {

const char* to_string(ConvolutionMethod m) {
  switch (m) {
    case ConvolutionMethod::Auto: return "auto";
    case ConvolutionMethod::Direct: return "direct";
    case ConvolutionMethod::Fft: return "fft";
    case ConvolutionMethod::Separable: return "separable";
  }
  return "auto";
}

ConvolutionMethod parse_method(const std::string& name) {
  if (name == "auto") return ConvolutionMethod::Auto;
  if (name == "direct") return ConvolutionMethod::Direct;
  if (name == "fft") return ConvolutionMethod::Fft;
  if (name == "separable") return ConvolutionMethod::Separable;
  fail(ErrorCode::Config, "unknown convolution method '" + name + "' (auto, direct, fft, separable)");
}

namespace {

constexpr double kDyadicUnit = 1099511627776.0;  // 2^40

// ---------------------------------------------------------------- direct

// Integer weights W_e summing to round(2^40 * stored fraction); the average is
// 2^-40 sum_e W_e f(x + o_e), which is exact for small integer fields.
struct DirectKernel {
  std::vector<int> offsets;
  std::vector<double> units;
};

DirectKernel make_direct(const AveragingKernel& k) {
  const auto entries = k.entries();
  DirectKernel dk;
  std::vector<double> rem(entries.size());
  double stored = 0.0, assigned = 0.0;
  dk.units.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const double x = entries[i].raw / k.raw_total * kDyadicUnit;
    dk.units[i] = std::floor(x);
    rem[i] = x - dk.units[i];
    stored += entries[i].raw;
    assigned += dk.units[i];
    dk.offsets.insert(dk.offsets.end(), entries[i].offset.begin(), entries[i].offset.end());
  }
  const double target = std::round(stored / k.raw_total * kDyadicUnit);
  long left = static_cast<long>(target - assigned);
  std::vector<std::size_t> order(entries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; left > 0 && i < order.size(); ++i, --left) dk.units[order[i]] += 1.0;
  for (std::size_t i = order.size(); left < 0 && i-- > 0;) {
    if (dk.units[order[i]] >= 1.0) {
      dk.units[order[i]] -= 1.0;
      ++left;
    }
  }
  return dk;
}

void direct_average(const Grid& g, const std::vector<double>& f, const DirectKernel& dk, std::vector<double>& acc) {
  const int d = g.dim;
  const auto stride = g.strides();
  std::fill(acc.begin(), acc.end(), 0.0);
  const std::size_t n_entries = dk.units.size();
  int lo[3] = {0, 0, 0}, hi[3] = {1, 1, 1};
  std::ptrdiff_t st[3] = {0, 0, 0};
  for (std::size_t e = 0; e < n_entries; ++e) {
    const int* o = dk.offsets.data() + e * d;
    const double w = dk.units[e];
    bool empty = false;
    std::ptrdiff_t shift = 0;
    // Pad to three axes; leading axes of lower-dimensional grids are trivial.
    for (int a = 0; a < 3; ++a) {
      const int ga = a - (3 - d);
      if (ga < 0) {
        lo[a] = 0, hi[a] = 1, st[a] = 0;
        continue;
      }
      lo[a] = std::max(0, -o[ga]);
      hi[a] = std::min(g.shape[ga], g.shape[ga] - o[ga]);
      st[a] = static_cast<std::ptrdiff_t>(stride[ga]);
      shift += static_cast<std::ptrdiff_t>(o[ga]) * st[a];
      empty = empty || lo[a] >= hi[a];
    }
    if (empty) continue;
    const int len = hi[2] - lo[2];
    for (int i = lo[0]; i < hi[0]; ++i)
      for (int j = lo[1]; j < hi[1]; ++j) {
        const std::ptrdiff_t base = i * st[0] + j * st[1] + lo[2];
        double* out = acc.data() + base;
        const double* in = f.data() + base + shift;
        for (int t = 0; t < len; ++t) out[t] += w * in[t];
      }
  }
  const double scale = 1.0 / kDyadicUnit;
  for (double& v : acc) v *= scale;
}

// ---------------------------------------------------------------- separable

void separable_average(const Grid& g, const std::vector<double>& f, const AveragingKernel& k,
                       std::vector<double>& work, std::vector<double>& out) {
  const int d = g.dim;
  const auto stride = g.strides();
  out = f;
  std::vector<double> prefix, line;
  for (int a = 0; a < d; ++a) {
    const auto& w = k.axis_raw[a];
    const int E = k.extent[a];
    int F = -1;
    while (F < E && w[F + 1 + E] == 1.0 && w[E - F - 1] == 1.0) ++F;
    std::vector<std::pair<int, double>> partial;
    for (int o = -E; o <= E; ++o)
      if (std::abs(o) > F && w[o + E] > 0.0) partial.emplace_back(o, w[o + E]);

    const int n = g.shape[a];
    const std::size_t s = stride[a];
    prefix.assign(n + 1, 0.0);
    line.resize(n);
    work.assign(out.size(), 0.0);
    const std::size_t lines = out.size() / n;
    for (std::size_t l = 0; l < lines; ++l) {
      // Line start: decompose l over the other axes.
      const std::size_t outer = l / s, inner = l % s;
      const std::size_t start = outer * s * n + inner;
      for (int i = 0; i < n; ++i) {
        line[i] = out[start + i * s];
        prefix[i + 1] = prefix[i] + line[i];
      }
      for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        if (F >= 0) sum = prefix[std::min(n, i + F + 1)] - prefix[std::max(0, i - F)];
        for (const auto& [o, wt] : partial) {
          const int j = i + o;
          if (j >= 0 && j < n) sum += wt * line[j];
        }
        work[start + i * s] = sum;
      }
    }
    std::swap(out, work);
  }
  const double inv = 1.0 / k.raw_total;
  for (double& v : out) v *= inv;
}

// ---------------------------------------------------------------- fft

int smooth_at_least(int m) {
  for (int c = std::max(m, 1);; ++c) {
    int r = c;
    for (int p : {2, 3, 5, 7})
      while (r % p == 0) r /= p;
    if (r == 1) return c;
  }
}

int padded_length(int n, int extent) {
  const int need = n + extent;
  for (int eighths : {1, 2, 4, 6, 8}) {
    const int tier = smooth_at_least(n + ((n - 1) * eighths + 7) / 8);
    if (tier >= need) return tier;
  }
  return smooth_at_least(need);
}

struct FftBuffer {
  double* real = nullptr;
  fftw_complex* freq = nullptr;
  std::size_t n_real = 0, n_spec = 0;
  FftBuffer() = default;
  FftBuffer(std::size_t nr, std::size_t ns) : n_real(nr), n_spec(ns) {
    real = fftw_alloc_real(nr);
    freq = fftw_alloc_complex(ns);
    require(real && freq, ErrorCode::Numerical, "FFT buffer allocation failed");
  }
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;
  FftBuffer(FftBuffer&& o) noexcept { swap(o); }
  FftBuffer& operator=(FftBuffer&& o) noexcept {
    swap(o);
    return *this;
  }
  void swap(FftBuffer& o) noexcept {
    std::swap(real, o.real);
    std::swap(freq, o.freq);
    std::swap(n_real, o.n_real);
    std::swap(n_spec, o.n_spec);
  }
  ~FftBuffer() {
    if (real) fftw_free(real);
    if (freq) fftw_free(freq);
  }
};

struct Spectrum {
  fftw_complex* data = nullptr;
  std::size_t n = 0;
  explicit Spectrum(std::size_t count) : data(fftw_alloc_complex(count)), n(count) {
    require(data != nullptr, ErrorCode::Numerical, "spectrum allocation failed");
  }
  Spectrum(const Spectrum&) = delete;
  Spectrum& operator=(const Spectrum&) = delete;
  ~Spectrum() { fftw_free(data); }
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftPlan {
  std::vector<int> shape;
  std::size_t n_real = 1, n_spec = 1;
  fftw_plan forward = nullptr, backward = nullptr;

  explicit FftPlan(std::vector<int> s) : shape(std::move(s)) {
    for (std::size_t a = 0; a + 1 < shape.size(); ++a) n_spec *= shape[a];
    n_spec *= shape.back() / 2 + 1;
    for (int v : shape) n_real *= v;
    FftBuffer probe(n_real, n_spec);
    std::lock_guard lock(planner_mutex());
    const int rank = static_cast<int>(shape.size());
    forward = fftw_plan_dft_r2c(rank, shape.data(), probe.real, probe.freq, FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r(rank, shape.data(), probe.freq, probe.real, FFTW_ESTIMATE);
    require(forward && backward, ErrorCode::Numerical, "FFTW planning failed");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

// Writes the kernel at (-o) mod P so that a circular convolution with the
// zero-padded field gives sum_o w_o f(x + o).
void place_kernel(const AveragingKernel& k, const FftPlan& plan, double* real) {
  const int d = k.dim;
  std::fill(real, real + plan.n_real, 0.0);
  const auto shape = k.block_shape();
  const std::size_t n = k.block_size();
  std::vector<int> o(d);
  for (std::size_t flat = 0; flat < n; ++flat) {
    const double r = k.raw_at(flat);
    if (r <= 0.0) continue;
    std::size_t rest = flat, pos = 0;
    for (int a = d - 1; a >= 0; --a) {
      o[a] = static_cast<int>(rest % shape[a]) - k.extent[a];
      rest /= shape[a];
    }
    for (int a = 0; a < d; ++a) {
      int idx = -o[a] % plan.shape[a];
      if (idx < 0) idx += plan.shape[a];
      pos = pos * plan.shape[a] + idx;
    }
    real[pos] = r / k.raw_total;
  }
}

void place_field(const Grid& g, const std::vector<double>& f, const FftPlan& plan, double* real) {
  std::fill(real, real + plan.n_real, 0.0);
  const int d = g.dim;
  const std::size_t row = g.shape[d - 1];
  const std::size_t rows = f.size() / row;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = r, pos = 0, mult = 1;
    for (int a = d - 2; a >= 0; --a) {
      pos += (rest % g.shape[a]) * mult;
      rest /= g.shape[a];
      mult *= plan.shape[a];
    }
    std::copy_n(f.data() + r * row, row, real + pos * plan.shape[d - 1]);
  }
}

void extract(const Grid& g, const FftPlan& plan, const double* real, double scale, double cap,
             std::vector<double>& out) {
  const int d = g.dim;
  const std::size_t row = g.shape[d - 1];
  const std::size_t rows = out.size() / row;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = r, pos = 0, mult = 1;
    for (int a = d - 2; a >= 0; --a) {
      pos += (rest % g.shape[a]) * mult;
      rest /= g.shape[a];
      mult *= plan.shape[a];
    }
    const double* src = real + pos * plan.shape[d - 1];
    double* dst = out.data() + r * row;
    // An average lies in [0, max f]; clamping removes transform round-off there.
    for (std::size_t i = 0; i < row; ++i) dst[i] = std::clamp(src[i] * scale, 0.0, cap);
  }
}

double field_max(const std::vector<double>& f) { return f.empty() ? 0.0 : *std::max_element(f.begin(), f.end()); }

}  // namespace

// ---------------------------------------------------------------- transformer

struct MaxTransformer::Impl {
  Grid grid;
  MaxOptions options;
  std::vector<double> lambdas;
  std::vector<AveragingKernel> kernels;
  std::vector<ConvolutionMethod> methods;
  std::vector<DirectKernel> direct;            // per dilation, when direct
  std::vector<std::vector<int>> fft_shape;     // per dilation, when fft
  std::map<std::vector<int>, std::unique_ptr<FftPlan>> plans;
  mutable std::mutex cache_mutex;
  mutable std::vector<std::shared_ptr<Spectrum>> spectra;
  mutable std::size_t cache_used = 0;
  int threads = 1;

  FftPlan& plan_for(const std::vector<int>& shape) {
    auto& p = plans[shape];
    if (!p) p = std::make_unique<FftPlan>(shape);
    return *p;
  }
};

MaxTransformer::MaxTransformer(const Grid& grid, const Body& body, const DilationLadder& ladder,
                               const MaxOptions& options)
    : impl_(std::make_unique<Impl>()) {
  grid.validate();
  require(body.dim() == grid.dim, ErrorCode::DimensionMismatch, "body and grid dimensions differ");
  ladder.validate(grid);
  auto& m = *impl_;
  m.grid = grid;
  m.options = options;
  m.threads = detail::resolve_threads(options.threads);
  m.lambdas = ladder.values();
  const std::size_t n = m.lambdas.size();
  m.kernels.resize(n);
  m.methods.resize(n);
  m.direct.resize(n);
  m.fft_shape.resize(n);
  m.spectra.resize(n);

  KernelOptions ko;
  ko.supersample = options.supersample;
  for (int a = 0; a < grid.dim; ++a) ko.max_offset.push_back(grid.shape[a] - 1);
  const bool is_box = body.as<AxisBox>() != nullptr;
  require(options.method != ConvolutionMethod::Separable || is_box, ErrorCode::Config,
          "separable convolution needs an axis-box body");

  detail::parallel_tasks(n, m.threads, [&](std::size_t i, int) {
    m.kernels[i] = build_kernel(body, m.lambdas[i], grid.spacing, ko);
  });

  const double cells = static_cast<double>(grid.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& k = m.kernels[i];
    std::vector<int> shape(grid.dim);
    double p_total = 1.0;
    for (int a = 0; a < grid.dim; ++a) {
      shape[a] = padded_length(grid.shape[a], k.extent[a]);
      p_total *= shape[a];
    }
    ConvolutionMethod method = options.method;
    if (method == ConvolutionMethod::Auto) {
      if (is_box) {
        method = ConvolutionMethod::Separable;
      } else {
        std::size_t nnz = 0;
        for (auto c : k.counts) nnz += c != 0;
        const double direct_cost = static_cast<double>(nnz) * cells;
        const double fft_cost = 3.0 * p_total * std::log2(std::max(2.0, p_total));
        method = direct_cost <= fft_cost ? ConvolutionMethod::Direct : ConvolutionMethod::Fft;
      }
    }
    m.methods[i] = method;
    if (method == ConvolutionMethod::Direct) m.direct[i] = make_direct(k);
    if (method == ConvolutionMethod::Fft) {
      m.fft_shape[i] = shape;
      m.plan_for(shape);
    }
  }
}

MaxTransformer::~MaxTransformer() = default;
MaxTransformer::MaxTransformer(MaxTransformer&&) noexcept = default;
MaxTransformer& MaxTransformer::operator=(MaxTransformer&&) noexcept = default;

const Grid& MaxTransformer::grid() const { return impl_->grid; }
const std::vector<double>& MaxTransformer::dilations() const { return impl_->lambdas; }
const std::vector<AveragingKernel>& MaxTransformer::kernels() const { return impl_->kernels; }
std::vector<ConvolutionMethod> MaxTransformer::methods() const { return impl_->methods; }

double MaxTransformer::discretization_bound() const {
  double b = 0.0;
  for (const auto& k : impl_->kernels) b = std::max(b, k.discretization_bound);
  return b;
}

ScalarField MaxTransformer::apply(const ScalarField& f) const {
  auto& m = *impl_;
  require_same_grid(f.grid, m.grid);
  f.validate();
  const std::size_t N = f.size();
  const int workers = std::max(1, std::min<int>(m.threads, static_cast<int>(m.lambdas.size())));
  std::vector<std::vector<double>> best(workers, f.values);
  std::vector<std::vector<double>> acc(workers, std::vector<double>(N));
  std::vector<std::vector<double>> work(workers);
  const double cap = field_max(f.values);

  auto merge = [&](int w) {
    auto& b = best[w];
    const auto& a = acc[w];
    for (std::size_t i = 0; i < N; ++i) b[i] = std::max(b[i], a[i]);
  };

  // Direct and separable dilations.
  std::vector<std::size_t> plain;
  std::map<std::vector<int>, std::vector<std::size_t>> by_shape;
  for (std::size_t i = 0; i < m.lambdas.size(); ++i) {
    if (m.methods[i] == ConvolutionMethod::Fft) by_shape[m.fft_shape[i]].push_back(i);
    else plain.push_back(i);
  }
  detail::parallel_tasks(plain.size(), workers, [&](std::size_t t, int w) {
    const std::size_t i = plain[t];
    if (m.methods[i] == ConvolutionMethod::Direct) direct_average(m.grid, f.values, m.direct[i], acc[w]);
    else separable_average(m.grid, f.values, m.kernels[i], work[w], acc[w]);
    merge(w);
  });

  // FFT dilations, one padded shape at a time so only one field spectrum is live.
  for (const auto& [shape, members] : by_shape) {
    const FftPlan& plan = *m.plans.at(shape);
    Spectrum field_spec(plan.n_spec);
    {
      FftBuffer buf(plan.n_real, plan.n_spec);
      place_field(m.grid, f.values, plan, buf.real);
      fftw_execute_dft_r2c(plan.forward, buf.real, field_spec.data);
    }
    std::vector<FftBuffer> bufs;
    for (int w = 0; w < std::min<int>(workers, static_cast<int>(members.size())); ++w)
      bufs.emplace_back(plan.n_real, plan.n_spec);
    const double scale = 1.0 / static_cast<double>(plan.n_real);
    detail::parallel_tasks(members.size(), static_cast<int>(bufs.size()), [&](std::size_t t, int w) {
      const std::size_t i = members[t];
      FftBuffer& b = bufs[w];
      std::shared_ptr<Spectrum> ks;
      {
        std::lock_guard lock(m.cache_mutex);
        ks = m.spectra[i];
      }
      if (!ks) {
        auto fresh = std::make_shared<Spectrum>(plan.n_spec);
        place_kernel(m.kernels[i], plan, b.real);
        fftw_execute_dft_r2c(plan.forward, b.real, fresh->data);
        const std::size_t bytes = plan.n_spec * sizeof(fftw_complex);
        std::lock_guard lock(m.cache_mutex);
        if (m.cache_used + bytes <= m.options.spectrum_cache_bytes) {
          m.spectra[i] = fresh;
          m.cache_used += bytes;
        }
        ks = std::move(fresh);
      }
      for (std::size_t j = 0; j < plan.n_spec; ++j) {
        const double ar = field_spec.data[j][0], ai = field_spec.data[j][1];
        const double br = ks->data[j][0], bi = ks->data[j][1];
        b.freq[j][0] = ar * br - ai * bi;
        b.freq[j][1] = ar * bi + ai * br;
      }
      fftw_execute_dft_c2r(plan.backward, b.freq, b.real);
      extract(m.grid, plan, b.real, scale, cap, acc[w]);
      merge(w);
    });
  }

  ScalarField out(m.grid, std::move(best[0]));
  for (int w = 1; w < workers; ++w)
    for (std::size_t i = 0; i < N; ++i) out[i] = std::max(out[i], best[w][i]);
  return out;
}

ScalarField MaxTransformer::average(const ScalarField& f, std::size_t i) const {
  const auto& m = *impl_;
  require_same_grid(f.grid, m.grid);
  require(i < m.lambdas.size(), ErrorCode::InvalidArgument, "dilation index out of range");
  return kernel_average(f, m.kernels[i], m.methods[i]);
}

ScalarField max_transform(const ScalarField& f, const Body& body, const DilationLadder& ladder,
                          const MaxOptions& options) {
  return MaxTransformer(f.grid, body, ladder, options).apply(f);
}

ScalarField kernel_average(const ScalarField& f, const AveragingKernel& kernel, ConvolutionMethod method) {
  require(kernel.dim == f.grid.dim, ErrorCode::DimensionMismatch, "kernel and field dimensions differ");
  std::vector<double> out(f.size());
  if (method == ConvolutionMethod::Auto) method = kernel.separable ? ConvolutionMethod::Separable : ConvolutionMethod::Direct;
  switch (method) {
    case ConvolutionMethod::Separable: {
      require(kernel.separable, ErrorCode::Config, "separable average needs a box kernel");
      std::vector<double> work;
      separable_average(f.grid, f.values, kernel, work, out);
      break;
    }
    case ConvolutionMethod::Direct: direct_average(f.grid, f.values, make_direct(kernel), out); break;
    default: {
      std::vector<int> shape(f.grid.dim);
      for (int a = 0; a < f.grid.dim; ++a) shape[a] = padded_length(f.grid.shape[a], std::min(kernel.extent[a], f.grid.shape[a] - 1));
      FftPlan plan(shape);
      FftBuffer fb(plan.n_real, plan.n_spec), kb(plan.n_real, plan.n_spec);
      place_field(f.grid, f.values, plan, fb.real);
      fftw_execute_dft_r2c(plan.forward, fb.real, fb.freq);
      place_kernel(kernel, plan, kb.real);
      fftw_execute_dft_r2c(plan.forward, kb.real, kb.freq);
      for (std::size_t j = 0; j < plan.n_spec; ++j) {
        const double ar = fb.freq[j][0], ai = fb.freq[j][1], br = kb.freq[j][0], bi = kb.freq[j][1];
        fb.freq[j][0] = ar * br - ai * bi;
        fb.freq[j][1] = ar * bi + ai * br;
      }
      fftw_execute_dft_c2r(plan.backward, fb.freq, fb.real);
      extract(f.grid, plan, fb.real, 1.0 / static_cast<double>(plan.n_real), field_max(f.values), out);
    }
  }
  return ScalarField(f.grid, std::move(out));
}

// ---------------------------------------------------------------- iteration

IterationResult iterate(const ScalarField& f0, const MaxTransformer& transformer, const IterateOptions& options) {
  require(options.n_max >= 0, ErrorCode::InvalidArgument, "n_max must be nonnegative");
  for (const auto& r : options.probes)
    require(r.size() == f0.size(), ErrorCode::GeometryMismatch, "probe window does not match grid");
  IterationResult res;
  res.field = f0;
  res.status = "max_iterations";
  for (int step = 1; step <= options.n_max; ++step) {
    ScalarField next = transformer.apply(res.field);
    IterationStep s;
    s.step = step;
    for (std::size_t i = 0; i < next.size(); ++i) {
      s.sup_change = std::max(s.sup_change, std::abs(next[i] - res.field[i]));
      s.monotone = s.monotone && next[i] >= res.field[i];
    }
    for (const auto& r : options.probes) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = 0; i < next.size(); ++i)
        if (r[i]) lo = std::min(lo, next[i]), hi = std::max(hi, next[i]);
      s.probe_min.push_back(lo);
      s.probe_max.push_back(hi);
    }
    res.monotone = res.monotone && s.monotone;
    res.field = std::move(next);
    res.trace.push_back(s);
    if (options.observer) options.observer(s, res.field);
    if (s.sup_change < options.stop_tol) {
      res.converged = true;
      res.status = "converged";
      break;
    }
    if (options.stop && options.stop(s, res.field)) {
      res.stopped = true;
      res.status = "stopped";
      break;
    }
  }
  return res;
}

IterationResult iterate(const ScalarField& f0, const Body& body, const DilationLadder& ladder,
                        const IterateOptions& options, const MaxOptions& max_options) {
  const MaxTransformer t(f0.grid, body, ladder, max_options);
  return iterate(f0, t, options);
}

double growth_ratio(const ScalarField& f, const Body& body, const DilationLadder& ladder, double p,
                    const MaxOptions& options) {
  const double base = lp_norm(f, p);
  require(base > 0.0, ErrorCode::InvalidArgument, "growth ratio of the zero field is undefined");
  return lp_norm(max_transform(f, body, ladder, options), p) / base;
}

}  // namespace hlmax
