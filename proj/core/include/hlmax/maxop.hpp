#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hlmax/body.hpp"
#include "hlmax/field.hpp"
#include "hlmax/kernel.hpp"

namespace hlmax {

enum class ConvolutionMethod {
  Auto,       // separable for axis boxes, otherwise direct or FFT by cost
  Direct,     // fixed-order summation with dyadic weights
  Fft,        // zero-padded real FFTs
  Separable,  // per-axis prefix sums, axis boxes only
};

const char* to_string(ConvolutionMethod m);
ConvolutionMethod parse_method(const std::string& name);

struct MaxOptions {
  ConvolutionMethod method = ConvolutionMethod::Auto;
  int threads = 0;  // 0: hardware concurrency
  int supersample = 4;
  /// Budget for cached kernel spectra, reused across apply() calls.
  std::size_t spectrum_cache_bytes = std::size_t{1280} << 20;
};

/// The maximal transform for a fixed grid, body and ladder. Kernels (and their
/// spectra, within the cache budget) are built once and reused, which is what
/// makes iteration affordable.
class MaxTransformer {
 public:
  MaxTransformer(const Grid& grid, const Body& body, const DilationLadder& ladder, const MaxOptions& options = {});
  ~MaxTransformer();
  MaxTransformer(MaxTransformer&&) noexcept;
  MaxTransformer& operator=(MaxTransformer&&) noexcept;

  /// max(f(x), max over the ladder of the average of f over x + lambda K),
  /// with f extended by zero outside the grid.
  ScalarField apply(const ScalarField& f) const;

  /// Average of f over x + lambda_i K for the i-th dilation alone.
  ScalarField average(const ScalarField& f, std::size_t i) const;

  const Grid& grid() const;
  const std::vector<double>& dilations() const;
  const std::vector<AveragingKernel>& kernels() const;
  /// Method actually used for each dilation.
  std::vector<ConvolutionMethod> methods() const;
  /// Largest kernel discretization bound over the ladder.
  double discretization_bound() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ScalarField max_transform(const ScalarField& f, const Body& body, const DilationLadder& ladder,
                          const MaxOptions& options = {});

/// Average of f over x + lambda K at every cell, for a single kernel.
ScalarField kernel_average(const ScalarField& f, const AveragingKernel& kernel,
                           ConvolutionMethod method = ConvolutionMethod::Direct);

struct IterationStep {
  int step = 0;
  double sup_change = 0.0;
  bool monotone = true;
  std::vector<double> probe_min;
  std::vector<double> probe_max;
};

struct IterateOptions {
  int n_max = 200;
  double stop_tol = 1e-4;
  std::vector<Region> probes;
  /// Optional extra stopping rule, checked after every step.
  std::function<bool(const IterationStep&, const ScalarField&)> stop;
  /// Called after every step (progress reporting, snapshots).
  std::function<void(const IterationStep&, const ScalarField&)> observer;
};

struct IterationResult {
  ScalarField field;
  std::vector<IterationStep> trace;
  bool converged = false;   // sup change fell below stop_tol
  bool stopped = false;     // the custom predicate fired
  bool monotone = true;     // every step was pointwise nondecreasing
  std::string status;
};

IterationResult iterate(const ScalarField& f0, const Body& body, const DilationLadder& ladder,
                        const IterateOptions& options = {}, const MaxOptions& max_options = {});
IterationResult iterate(const ScalarField& f0, const MaxTransformer& transformer, const IterateOptions& options = {});

/// ||Mf||_p / ||f||_p.
double growth_ratio(const ScalarField& f, const Body& body, const DilationLadder& ladder, double p,
                    const MaxOptions& options = {});

}  // namespace hlmax
