#pragma once

#include <Eigen/Dense>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hlmax/rational.hpp"

namespace hlmax {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr int kMaxDim = 3;

class Body;

struct Ball {
  double radius;
};

struct AxisBox {
  Vec half_widths;
};

struct CrossPolytope {
  double scale;
};

/// Half-space n . x <= offset, with |n| = 1.
struct Facet {
  Vec normal;
  double offset;
};

/// Convex hull of a centrally symmetric vertex set. `fan` lists (d-1)-simplices
/// tiling the boundary, by vertex index; coning them from the origin tiles the body.
struct VPolytope {
  std::vector<Vec> vertices;
  std::vector<Facet> facets;
  std::vector<std::vector<int>> fan;
};

struct LinearImage {
  std::shared_ptr<const Body> base;
  Mat matrix;
  Mat inverse;
  double abs_det;
};

// Exact (rational) description of a body, kept alongside the floating data so
// that certificates can be decided without a threshold. The body equals
// `scale` times the shape described here.
struct ExactForm;

struct ExactBall {
  int dim;
  Rational radius;
};
struct ExactBox {
  std::vector<Rational> half_widths;
};
struct ExactCross {
  int dim;
  Rational scale;
};
struct ExactPolytope {
  int dim;
  std::vector<std::vector<Rational>> vertices;
  std::vector<std::vector<int>> fan;
};
struct ExactLinear {
  int dim;
  std::shared_ptr<const ExactForm> base;
  std::vector<Rational> matrix;  // row-major dim x dim
};

struct ExactForm {
  std::variant<ExactBall, ExactBox, ExactCross, ExactPolytope, ExactLinear> shape;
  double scale = 1.0;
};

struct LinearMapOptions {
  double max_condition = 1e8;
};

/// A centrally symmetric convex body in dimension 1..3. Immutable after construction.
class Body {
 public:
  using Shape = std::variant<Ball, AxisBox, CrossPolytope, VPolytope, LinearImage>;

  static Body ball(int dim, double radius);
  static Body box(std::vector<double> half_widths);
  static Body cross(int dim, double scale);
  static Body polytope(std::vector<Vec> vertices);

  static Body exact_ball(int dim, const Rational& radius);
  static Body exact_box(const std::vector<Rational>& half_widths);
  static Body exact_cross(int dim, const Rational& scale);
  static Body exact_polytope(const std::vector<std::vector<Rational>>& vertices);

  int dim() const { return dim_; }
  const Shape& shape() const { return shape_; }
  std::string kind() const;

  /// Rational description, when the body was built from exact data and only
  /// scaled or mapped by rational matrices since.
  const ExactForm* exact() const { return exact_.get(); }
  std::shared_ptr<const ExactForm> exact_shared() const { return exact_; }

  template <class T>
  const T* as() const { return std::get_if<T>(&shape_); }

 private:
  Body(int dim, Shape shape, std::shared_ptr<const ExactForm> exact)
      : dim_(dim), shape_(std::move(shape)), exact_(std::move(exact)) {}

  friend Body linear_map(const Body&, const Mat&, const LinearMapOptions&);
  friend Body linear_map_exact(const Body&, const std::vector<Rational>&, const LinearMapOptions&);
  friend Body scaled(const Body&, double);

  int dim_;
  Shape shape_;
  std::shared_ptr<const ExactForm> exact_;
};

double volume(const Body& body);
bool contains(const Body& body, const Vec& x);

/// Minkowski gauge: smallest t >= 0 with x in tK.
double gauge(const Body& body, const Vec& x);

/// Support function max_{y in K} <u, y>.
double support(const Body& body, const Vec& direction);

/// Smallest r with K inside the Euclidean ball of radius r.
double support_radius(const Body& body);

/// Parameter interval {t : p + t u in K}, empty when the line misses K.
std::optional<std::pair<double, double>> chord(const Body& body, const Vec& p, const Vec& u);

/// The body A K. Scalars keep the variant (and the exact form); diagonal maps
/// keep an AxisBox; V-polytopes map their vertices; otherwise a LinearImage.
Body linear_map(const Body& body, const Mat& A, const LinearMapOptions& options = {});

/// Same as linear_map with a rational row-major matrix; exactness is preserved.
Body linear_map_exact(const Body& body, const std::vector<Rational>& A,
                      const LinearMapOptions& options = {});

/// cK for c > 0.
Body scaled(const Body& body, double c);

/// Vertices of polytopal bodies (box corners, cross vertices, mapped vertices);
/// empty for balls and images of balls.
std::vector<Vec> polytope_vertices(const Body& body);

}  // namespace hlmax
