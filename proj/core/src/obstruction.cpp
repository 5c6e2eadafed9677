#include "hlmax/obstruction.hpp"

#include <cmath>

#include "hlmax/error.hpp"
#include "hlmax/green.hpp"
#include "hlmax/moments.hpp"

namespace hlmax {

Certificate certify(const Body& body, int order, const Vec& point) {
  const int d = body.dim();
  require(d >= 3, ErrorCode::Unsupported, "obstruction needs d >= 3");
  require(point.size() == d, ErrorCode::DimensionMismatch, "evaluation point dimension != body dimension");
  const double defect = isotropy_defect(body);
  require(defect <= kIsotropyTolerance, ErrorCode::NotIsotropic,
          "body is not isotropic (second moments deviate from identity by " + std::to_string(defect) +
              "); isotropize it first");

  Certificate c;
  c.order = order;
  c.point = point;

  if (const auto moments = exact_moment_tensor(body, order)) {
    std::vector<Rational> p(d);
    for (int i = 0; i < d; ++i) p[i] = rational_from_double(point(i));
    const ExactTensor green = exact_green_coeffs(d, p, order);
    Rational sum = 0;
    const auto& a = green.coefficients;
    const auto& t = moments->coefficients;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] == 0 || t[k] == 0) continue;
      sum += Rational(static_cast<long>(std::llround(multinomial(a.exponents()[k])))) * a[k] * t[k];
    }
    c.arithmetic = "exact";
    c.factor = green.factor * moments->factor;
    if (!green.factor_note.empty() && !moments->factor_note.empty())
      c.factor_note = green.factor_note + " * " + moments->factor_note;
    else
      c.factor_note = green.factor_note + moments->factor_note;
    c.Q = to_double(sum) * c.factor;
    c.is_obstructed = sum != 0;
    c.exact_coefficient = sum;
    return c;
  }

  const auto green = green_coeffs(d, point, order);
  const auto moments = moment_tensor(body, order);
  c.arithmetic = "float";
  c.Q = full_contraction(green.tensor, moments);
  c.is_obstructed = std::abs(c.Q) > kCertificateEpsilon;
  return c;
}

RotationScan rotation_scan(const Body& body, int order, const std::vector<Mat>& rotations, const Vec& point) {
  const int d = body.dim();
  RotationScan scan;
  scan.values.reserve(rotations.size());
  for (const auto& R : rotations) {
    require(R.rows() == d && R.cols() == d, ErrorCode::DimensionMismatch, "rotation has wrong size");
    const double gram = (R.transpose() * R - Mat::Identity(d, d)).cwiseAbs().maxCoeff();
    require(gram <= 1e-10, ErrorCode::InvalidArgument,
            "rotation is not orthogonal (Gram deviation " + std::to_string(gram) + ")");
    scan.values.push_back(obstruction(linear_map(body, R), order, point));
  }
  if (!scan.values.empty()) {
    double sum = 0.0;
    for (double v : scan.values) sum += v;
    scan.mean = sum / static_cast<double>(scan.values.size());
  }
  return scan;
}

}  // namespace hlmax
