#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "hlmax/error.hpp"
#include "hlmax/experiments.hpp"
#include "hlmax/field.hpp"

using namespace hlmax;

namespace {

Grid line(double lo, double hi, double h) { return Grid::cube(1, lo, hi, static_cast<int>(std::llround((hi - lo) / h))); }

ScalarField fill(const Grid& g, auto fn) { return sample(g, [&](const Vec& x) { return fn(x); }); }

}  // namespace

TEST_CASE("Lp norm examples") {
  CHECK(lp_norm(ScalarField(line(0, 1, 1e-3), 1.0), 2) == doctest::Approx(1.0).epsilon(1e-3));
  const Grid g = line(-2, 2, 1e-3);
  const ScalarField ind = fill(g, [](const Vec& x) { return std::abs(x(0)) <= 1 ? 1.0 : 0.0; });
  CHECK(lp_norm(ind, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
  const ScalarField ramp = fill(line(0, 1, 1e-3), [](const Vec& x) { return x(0); });
  CHECK(lp_norm(ramp, 2) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-3));
  CHECK_THROWS_AS(lp_norm(ramp, 1.0), Error);
}

TEST_CASE("Lp norm is homogeneous") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  ScalarField f(Grid::cube(2, 0, 1, 40));
  for (auto& v : f.values) v = u(rng);
  for (double c : {0.5, 3.0, 1e3}) {
    ScalarField g = f;
    for (auto& v : g.values) v *= c;
    for (double p : {1.5, 2.0, 4.0}) CHECK(lp_norm(g, p) == doctest::Approx(c * lp_norm(f, p)).epsilon(1e-14));
  }
}

TEST_CASE("superlevel measures") {
  const double h = 1e-3;
  const Grid g = line(-2, 2, h);
  const ScalarField ind = fill(g, [](const Vec& x) { return std::abs(x(0)) <= 1 ? 1.0 : 0.0; });
  CHECK(std::abs(superlevel_measure(ind, 0.5) - 2.0) <= 2 * h);
  CHECK(superlevel_measure(ind, 1.5) == 0.0);
  const ScalarField t = tent(g, Body::box({1.0}));
  CHECK(std::abs(superlevel_measure(t, 0.5) - 1.0) <= 2 * h);

  double prev = superlevel_measure(t, 1e-6);
  for (double mu = 0.05; mu < 1.1; mu += 0.05) {
    const double m = superlevel_measure(t, mu);
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("layer cake matches the Lp norm") {
  const Grid g = Grid::cube(2, -2, 2, 200);
  const Body disk = Body::ball(2, 1.0);
  for (const ScalarField& f : {tent(g, disk), indicator(g, disk)})
    for (double p : {1.5, 2.0, 3.0}) {
      const double lc = layer_cake_integral(f, p);
      CHECK(lc == doctest::Approx(std::pow(lp_norm(f, p), p)).epsilon(0.01));
    }
}

TEST_CASE("discrete Laplacian") {
  const Grid g = Grid::cube(2, -1, 1, 41);
  const SignedField zero = discrete_laplacian(ScalarField(g, 3.0));
  const SignedField sq = discrete_laplacian(fill(g, [](const Vec& x) { return x(0) * x(0) + 5.0; }));
  const SignedField lin = discrete_laplacian(fill(g, [](const Vec& x) { return 2 + 0.3 * x(0) + 0.7 * x(1); }));
  std::size_t valid = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!zero.valid[i]) continue;
    ++valid;
    CHECK(zero.values[i] == 0.0);
    CHECK(sq.values[i] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(lin.values[i]) < 1e-10);
  }
  CHECK(valid == 39 * 39);

  // |x|^{-1} is harmonic away from 0; the five-point error is O(h^2).
  for (int n : {40, 80}) {
    const Grid g3 = Grid::cube(3, -3, 3, n);
    const ScalarField f = fill(g3, [](const Vec& x) { return 1.0 / std::max(x.norm(), 1e-3); });
    const SignedField lap = discrete_laplacian(f);
    const Region ann = annulus_region(g3, 1.5, 2.5);
    double worst = 0.0;
    for (std::size_t i = 0; i < g3.size(); ++i)
      if (ann[i] && lap.valid[i]) worst = std::max(worst, std::abs(lap.values[i]));
    const double hsq = g3.spacing * g3.spacing;
    MESSAGE("n=" << n << " max |lap| " << worst);
    CHECK(worst < 0.5 * hsq);
  }
}

TEST_CASE("domination reports") {
  const Grid g = line(-2, 2, 1e-2);
  const ScalarField ind = fill(g, [](const Vec& x) { return std::abs(x(0)) <= 1 ? 1.0 : 0.0; });
  ScalarField half = ind;
  for (auto& v : half.values) v *= 0.5;
  CHECK(dominates(ind, ind, 0.0).holds);
  CHECK(dominates(ind, half, 0.0).holds);
  const DominanceReport r = dominates(half, ind, 0.0);
  CHECK_FALSE(r.holds);
  CHECK(r.worst_margin == doctest::Approx(-0.5));
  CHECK(std::abs(r.worst_point(0)) <= 1.0);
  CHECK_THROWS_AS(dominates(ind, ScalarField(line(-1, 1, 1e-2)), 0.0), Error);
}

TEST_CASE("field validation") {
  ScalarField f(Grid::cube(1, 0, 1, 4));
  f[2] = -1.0;
  CHECK_THROWS_AS(f.validate(), Error);
  f[2] = std::nan("");
  CHECK_THROWS_AS(f.validate(), Error);
  CHECK_THROWS_AS(Grid::cube(2, 0, 1, 1), Error);
}

TEST_CASE("superharmonicity checks") {
  const Grid g = Grid::cube(3, -3, 3, 48);
  const Region ann = annulus_region(g, 1.2, 2.5);
  CHECK(superharmonicity_check(ScalarField(g, 2.0), ann, 1e-12).passes);
  const ScalarField green = fill(g, [](const Vec& x) { return 1.0 / std::max(x.norm(), 1e-3); });
  // seven-point error is about h^2 / 12 * sum_i d_i^4 |x|^{-1}, at most 1.4 h^2 for |x| >= 1.2
  const SuperharmonicReport gr = superharmonicity_check(green, ann, 2.0 * g.spacing * g.spacing);
  MESSAGE("max laplacian of |x|^-1 " << gr.max_laplacian << ", h^2 " << g.spacing * g.spacing);
  CHECK(gr.passes);
  const SuperharmonicReport sq = superharmonicity_check(fill(g, [](const Vec& x) { return x.squaredNorm(); }), ann, 1e-6);
  CHECK_FALSE(sq.passes);
  CHECK(sq.max_laplacian == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("field files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "hlmax_field_test";
  std::filesystem::remove_all(dir);
  const Grid g = Grid::cube(2, -1, 1, 7);
  const ScalarField f = fill(g, [](const Vec& x) { return 1.0 / (1.0 + x.squaredNorm()) + 1e-17; });
  write_field(f, (dir / "f").string());
  const ScalarField back = read_field((dir / "f").string());
  CHECK(back.grid == g);
  CHECK(back.values == f.values);
  const std::string csv = slice_csv(f);
  CHECK(csv.rfind("x,y,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 49);
  std::filesystem::remove_all(dir);
}
