#include "hlmax/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hlmax/error.hpp"
#include "hlmax/moments.hpp"
#include "hlmax/obstruction.hpp"
#include "hlmax/quadrature.hpp"

namespace hlmax {

LevelsetReport levelset_compare(const ScalarField& f, const ScalarField& iterates, double mu, double delta, int n,
                                double B) {
  require_same_grid(f.grid, iterates.grid);
  require(mu > 0.0 && delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "level-set test needs mu > 0, 0 < delta < 1");
  require(B > 0.0, ErrorCode::InvalidArgument, "overlap bound B must be positive");
  LevelsetReport r;
  r.mu = mu;
  r.delta = delta;
  r.n = n;
  r.B = B;
  r.threshold = mu * std::pow(1.0 - delta, 2) / std::pow(1.0 + delta, 3);
  r.lhs = superlevel_measure(iterates, r.threshold);
  r.rhs = superlevel_measure(f, mu) + superlevel_measure(f, 2.0 * mu) / B;
  r.slack = r.lhs - r.rhs;
  r.holds = r.slack >= 0.0;
  return r;
}

LevelsetReport levelset_experiment(const ScalarField& f, const MaxTransformer& transformer, double mu, double delta,
                                   int n, double B) {
  require(n >= 0, ErrorCode::InvalidArgument, "iteration count must be nonnegative");
  ScalarField g = f;
  for (int k = 0; k <= n; ++k) g = transformer.apply(g);
  return levelset_compare(f, g, mu, delta, n, B);
}

CoverInput levelset_family(const ScalarField& f, const Body& body, const MaxTransformer& transformer, double mu,
                           double delta) {
  const auto& lambdas = transformer.dilations();
  const double level = mu * (1.0 - delta);
  std::vector<double> best(f.size(), 0.0);
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const ScalarField avg = transformer.average(f, i);
    for (std::size_t c = 0; c < f.size(); ++c)
      if (avg[c] >= level) best[c] = lambdas[i];
  }
  CoverInput in{body, 2.0 * lambdas.back(), {}};
  const double fallback = 0.5 * lambdas.front();  // below the ladder: only the cell itself
  for (std::size_t c = 0; c < f.size(); ++c) {
    if (f[c] < mu) continue;
    in.items.push_back({f.grid.center(c), best[c] > 0.0 ? best[c] : fallback});
  }
  return in;
}

std::vector<LevelsetSweepRow> levelset_sweep(const ScalarField& f, const Body& body, const MaxTransformer& transformer,
                                             const std::vector<double>& mus, double delta, int n, double B) {
  ScalarField g = f;
  for (int k = 0; k <= n; ++k) g = transformer.apply(g);
  std::vector<LevelsetSweepRow> rows;
  for (double mu : mus) {
    LevelsetSweepRow row;
    const CoverInput family = levelset_family(f, body, transformer, mu, delta);
    row.family_size = family.items.size();
    if (!family.items.empty()) {
      const CoverReport cover = greedy_cover(family);
      row.selected = cover.selected.size();
      row.family_overlap = cover.overlap_max;
      std::size_t cells = 0;
      for (std::size_t c = 0; c < f.size(); ++c) {
        const Vec x = f.grid.center(c);
        for (std::size_t s : cover.selected)
          if (in_item(family.body, family.items[s], x)) {
            ++cells;
            break;
          }
      }
      row.union_measure = static_cast<double>(cells) * f.grid.cell_volume();
    }
    const double b = B > 0.0 ? B : std::max(1, row.family_overlap);
    row.report = levelset_compare(f, g, mu, delta, n, b);
    rows.push_back(std::move(row));
  }
  return rows;
}

SuperharmonicReport superharmonicity_check(const ScalarField& f, const Region& window, double tol) {
  require(window.size() == f.size(), ErrorCode::GeometryMismatch, "window does not match grid");
  const SignedField lap = discrete_laplacian(f);
  SuperharmonicReport r;
  r.max_laplacian = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!window[i] || !lap.valid[i]) continue;
    ++r.checked;
    if (lap.values[i] > r.max_laplacian) {
      r.max_laplacian = lap.values[i];
      r.worst_cell = i;
    }
  }
  require(r.checked > 0, ErrorCode::InvalidArgument, "window contains no interior cells");
  r.passes = r.max_laplacian <= tol;
  return r;
}

namespace {

std::vector<double> probe_values(const BodyRule& rule, const Vec& p, const std::vector<double>& lambdas, int d) {
  double vol = 0.0;
  for (double w : rule.weights) vol += w;
  const double h0 = std::pow(p.norm(), 2.0 - d);
  std::vector<double> out;
  for (double lam : lambdas) {
    const double sum = integrate(rule, [&](const Vec& y) { return std::pow((p + lam * y).norm(), 2.0 - d) - h0; });
    out.push_back(sum / vol / std::pow(lam, 4));
  }
  return out;
}

}  // namespace

QuarticProbeReport quartic_probe(const Body& body, const std::vector<double>& lambdas, const Vec& point,
                                 const QuarticProbeOptions& options) {
  const int d = body.dim();
  require(d == 3, ErrorCode::Unsupported, "quartic probe is defined for d = 3");
  require(point.size() == d, ErrorCode::DimensionMismatch, "probe point dimension != 3");
  require(!lambdas.empty(), ErrorCode::InvalidArgument, "quartic probe needs at least one dilation");
  const double defect = isotropy_defect(body);
  require(defect <= kIsotropyTolerance, ErrorCode::NotIsotropic, "quartic probe needs an isotropic body");
  const double reach = support_radius(body);
  for (double lam : lambdas) {
    require(lam > 0.0, ErrorCode::InvalidArgument, "dilations must be positive");
    require(lam * reach < point.norm(), ErrorCode::InvalidArgument,
            "dilation " + std::to_string(lam) + " is too large: the body reaches the singularity at the origin");
  }
  const double r = lambdas.size() > 1 ? lambdas[0] / lambdas[1] : 2.0;
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    require(std::abs(lambdas[i - 1] / lambdas[i] - r) <= 1e-9 * r && r > 1.0, ErrorCode::InvalidArgument,
            "quartic probe dilations must decrease geometrically");

  QuarticProbeReport rep;
  rep.lambdas = lambdas;
  const BodyRule coarse = body_rule(body, options.nodes);
  const BodyRule fine = body_rule(body, 2 * options.nodes);
  rep.points = fine.points.size();
  rep.coarse_values = probe_values(coarse, point, lambdas, d);
  rep.values = probe_values(fine, point, lambdas, d);

  rep.richardson.push_back(rep.values);
  for (std::size_t j = 1; j < lambdas.size(); ++j) {
    const auto& prev = rep.richardson.back();
    const double f = std::pow(r, 2.0 * j);
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) next.push_back((f * prev[i + 1] - prev[i]) / (f - 1.0));
    rep.richardson.push_back(std::move(next));
  }
  rep.extrapolated = rep.richardson.back().back();
  rep.target = obstruction(body, 4, point) / (24.0 * volume(body));
  rep.relative_error = rep.target != 0.0 ? std::abs(rep.extrapolated - rep.target) / std::abs(rep.target)
                                         : std::abs(rep.extrapolated);
  return rep;
}

}  // namespace hlmax
