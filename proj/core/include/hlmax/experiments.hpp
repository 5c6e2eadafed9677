#pragma once

#include <vector>

#include "hlmax/body.hpp"
#include "hlmax/covering.hpp"
#include "hlmax/field.hpp"
#include "hlmax/maxop.hpp"

namespace hlmax {

// ---------------------------------------------------------------- level sets

struct LevelsetReport {
  double mu = 0.0;
  double delta = 0.0;
  int n = 0;
  double B = 1.0;
  double threshold = 0.0;  // mu (1 - delta)^2 / (1 + delta)^3
  double lhs = 0.0;        // |{M^{n+1} f >= threshold}|
  double rhs = 0.0;        // |{f >= mu}| + |{f >= 2 mu}| / B
  double slack = 0.0;
  bool holds = true;
};

/// Both sides of the level-set inequality on the grid. `iterates` must hold
/// M^{n+1} f (computed once and shared across a sweep over mu).
LevelsetReport levelset_compare(const ScalarField& f, const ScalarField& iterates, double mu, double delta, int n,
                                double B);

/// Computes M^{n+1} f with the transformer and compares.
LevelsetReport levelset_experiment(const ScalarField& f, const MaxTransformer& transformer, double mu, double delta,
                                   int n, double B);

/// The family {x + lambda_x K} of the argument: every cell with f >= mu paired
/// with the largest ladder dilation whose average still reaches mu (1 - delta).
CoverInput levelset_family(const ScalarField& f, const Body& body, const MaxTransformer& transformer, double mu,
                           double delta);

struct LevelsetSweepRow {
  LevelsetReport report;
  std::size_t family_size = 0;
  std::size_t selected = 0;
  int family_overlap = 0;   // overlap_max of the greedy subfamily
  double union_measure = 0.0;  // |union of selected S_i| on the grid
};

/// One row per mu; B is the supplied bound, or (B <= 0) each row's own
/// family overlap. The family columns come from the
/// greedy cover of levelset_family.
std::vector<LevelsetSweepRow> levelset_sweep(const ScalarField& f, const Body& body, const MaxTransformer& transformer,
                                             const std::vector<double>& mus, double delta, int n, double B);

// ---------------------------------------------------------------- superharmonicity

struct SuperharmonicReport {
  double max_laplacian = 0.0;
  std::size_t worst_cell = 0;
  std::size_t checked = 0;
  bool passes = true;
};

/// max of the discrete Laplacian over the valid cells of `window`.
SuperharmonicReport superharmonicity_check(const ScalarField& f, const Region& window, double tol);

// ---------------------------------------------------------------- quartic probe

struct QuarticProbeOptions {
  int nodes = 48;       // Gauss nodes per direction, coarse level; fine = 2 * nodes
};

struct QuarticProbeReport {
  std::vector<double> lambdas;
  std::vector<double> values;         // fine level
  std::vector<double> coarse_values;  // coarse level
  /// Richardson table: level j has lambdas.size() - j entries.
  std::vector<std::vector<double>> richardson;
  double extrapolated = 0.0;
  double target = 0.0;  // Q / (24 |K|)
  double relative_error = 0.0;
  std::size_t points = 0;  // quadrature points at the fine level
};

/// (average of h over point + lambda K - h(point)) / lambda^4 for each lambda,
/// h = |x|^{2-d}; the lambdas must form a geometric sequence for the
/// Richardson table.
QuarticProbeReport quartic_probe(const Body& body, const std::vector<double>& lambdas, const Vec& point,
                                 const QuarticProbeOptions& options = {});

}  // namespace hlmax
