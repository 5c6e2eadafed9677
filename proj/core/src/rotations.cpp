#include <cmath>
#include <numbers>
#include <random>

#include "hlmax/error.hpp"
#include "hlmax/obstruction.hpp"

namespace hlmax {
namespace {

double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

double wrap(double x) { return x - std::floor(x); }

}  // namespace

std::vector<Mat> quasi_random_rotations(int dim, std::size_t count, std::uint64_t seed) {
  require(dim == 2 || dim == 3, ErrorCode::Unsupported, "rotation sets are generated for d = 2 or 3");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double shift[3] = {uni(rng), uni(rng), uni(rng)};
  constexpr double two_pi = 2.0 * std::numbers::pi;

  std::vector<Mat> out;
  out.reserve(count);
  for (std::size_t n = 1; n <= count; ++n) {
    if (dim == 2) {
      const double t = two_pi * wrap(radical_inverse(n, 2) + shift[0]);
      Mat R(2, 2);
      R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      out.push_back(R);
      continue;
    }
    const double u1 = wrap(radical_inverse(n, 2) + shift[0]);
    const double u2 = wrap(radical_inverse(n, 3) + shift[1]);
    const double u3 = wrap(radical_inverse(n, 5) + shift[2]);
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    const Eigen::Quaterniond q(b * std::cos(two_pi * u3), a * std::sin(two_pi * u2), a * std::cos(two_pi * u2),
                               b * std::sin(two_pi * u3));
    out.push_back(q.normalized().toRotationMatrix());
  }
  return out;
}

}  // namespace hlmax
