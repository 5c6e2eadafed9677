#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlmax/body.hpp"
#include "hlmax/rational.hpp"

namespace hlmax {

inline constexpr double kCertificateEpsilon = 1e-8;
inline constexpr double kIsotropyTolerance = 1e-8;

struct Certificate {
  int order = 4;
  Vec point;
  double Q = 0.0;
  bool is_obstructed = false;
  std::string arithmetic;  // "exact" or "float"
  // Exact path only: Q = exact_coefficient * factor with factor > 0.
  std::optional<Rational> exact_coefficient;
  double factor = 1.0;
  std::string factor_note;
};

/// Contraction of the Green tensor at `point` with the order-`order` moments.
/// The body must be isotropic and d >= 3. Exact arithmetic decides Q != 0
/// whenever the body carries a rational form; otherwise |Q| > kCertificateEpsilon.
Certificate certify(const Body& body, int order, const Vec& point);

inline double obstruction(const Body& body, int order, const Vec& point) {
  return certify(body, order, point).Q;
}

inline bool is_obstructed(const Body& body, int order, const Vec& point) {
  return certify(body, order, point).is_obstructed;
}

struct RotationScan {
  std::vector<double> values;
  double mean = 0.0;
};

/// Q(R K, point) for each rotation R, plus their average.
RotationScan rotation_scan(const Body& body, int order, const std::vector<Mat>& rotations, const Vec& point);

/// Low-discrepancy rotations: a shifted Halton sequence pushed through the
/// uniform quaternion map (d = 3) or the angle map (d = 2).
std::vector<Mat> quasi_random_rotations(int dim, std::size_t count, std::uint64_t seed);

}  // namespace hlmax
