#pragma once

#include <cstdint>
#include <vector>

#include "hlmax/body.hpp"
#include "hlmax/field.hpp"

namespace hlmax {

struct KernelOptions {
  int supersample = 4;
  /// Offsets with |o_a| > max_offset[a] are not stored (they can never reach a
  /// grid cell); the normalizer still counts them. Empty: store everything.
  std::vector<int> max_offset;
};

struct KernelEntry {
  std::vector<int> offset;
  double raw;
  double weight;
};

/// Discrete normalized average over x + lambda K on a grid of the given
/// spacing. The stored block covers offsets -extent..extent per axis.
struct AveragingKernel {
  int dim = 0;
  double lambda = 0.0;
  double spacing = 0.0;
  int supersample = 0;  // 0: exact box rasterization
  std::vector<int> radius;  // footprint half-extent per axis, in cells
  std::vector<int> extent;  // stored half-extent per axis (<= radius)

  // Axis boxes are separable: covered fraction of cell o along axis a is
  // axis_raw[a][o + extent[a]]. Other bodies keep sub-sample counts out of
  // supersample^d over the stored block, row-major.
  bool separable = false;
  std::vector<std::vector<double>> axis_raw;
  std::vector<double> axis_total;  // per-axis sum over the full radius
  std::vector<std::uint8_t> counts;

  /// Covered cells over the whole footprint, stored or not.
  double raw_total = 0.0;
  /// Sum of normalized weights over the stored block (1 when nothing was dropped).
  double weight_sum = 0.0;
  /// |raw_total h^d - |lambda K|| / |lambda K|.
  double discretization_bound = 0.0;

  std::size_t block_size() const;
  std::vector<int> block_shape() const;
  /// Covered fraction of the cell at block position `flat` (row-major).
  double raw_at(std::size_t flat) const;
  /// Nonzero stored cells in lexicographic offset order.
  std::vector<KernelEntry> entries() const;
};

/// Fractions come from exact interval clipping for axis boxes and from k^d
/// supersampling (k = options.supersample, 1..6) otherwise.
AveragingKernel build_kernel(const Body& body, double lambda, double spacing, const KernelOptions& options = {});

/// Geometric dilations lambda_min * ratio^k below lambda_max, then lambda_max.
struct DilationLadder {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double ratio = 1.05;

  std::vector<double> values() const;
  /// lambda_min >= spacing, lambda_max <= domain diameter, 1 < ratio <= 1.2.
  void validate(const Grid& grid) const;
  /// Bound on the relative gap between the supremum over all dilations in
  /// [lambda_min, lambda_max] and the maximum over the ladder: ratio^d - 1.
  double sup_gap_bound(int dim) const;

  /// lambda_min = spacing, lambda_max = domain diameter.
  static DilationLadder for_grid(const Grid& grid, double ratio = 1.05);
};

}  // namespace hlmax
