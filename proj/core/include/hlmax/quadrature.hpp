#pragma once

#include <functional>
#include <vector>

#include "hlmax/body.hpp"

namespace hlmax {

struct GaussRule {
  std::vector<double> nodes;  // on [-1, 1]
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

/// A weighted point set whose weights sum to the body's volume and which
/// integrates smooth functions over the body to high order. `n` is the number
/// of Gauss nodes per coordinate direction (per simplex for polytopes).
struct BodyRule {
  std::vector<Vec> points;
  std::vector<double> weights;
};

BodyRule body_rule(const Body& body, int n);

/// Kahan-compensated sum of w_i g(y_i).
double integrate(const BodyRule& rule, const std::function<double(const Vec&)>& g);

}  // namespace hlmax
