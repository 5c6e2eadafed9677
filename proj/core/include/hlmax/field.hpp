#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hlmax/body.hpp"

namespace hlmax {

/// Uniform cell-centred grid. Cell i has centre origin + (i + 1/2) * spacing,
/// so `origin` is the lower corner of the domain. Axis 0 varies slowest.
struct Grid {
  int dim = 1;
  Vec origin;
  double spacing = 1.0;
  std::vector<int> shape;

  /// n^d cells covering [lo, hi]^d.
  static Grid cube(int dim, double lo, double hi, int n);

  std::size_t size() const;
  double cell_volume() const;
  std::vector<std::size_t> strides() const;
  std::vector<int> unravel(std::size_t index) const;
  std::size_t ravel(const std::vector<int>& cell) const;
  Vec center(std::size_t index) const;
  Vec center(const std::vector<int>& cell) const;
  /// Largest distance between two points of the domain.
  double diameter() const;
  void validate() const;

  bool operator==(const Grid& other) const;
};

struct ScalarField {
  Grid grid;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(Grid g, double fill = 0.0);
  ScalarField(Grid g, std::vector<double> v);

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
  double max() const;
  double min() const;
  /// Finite and nonnegative values, matching geometry.
  void validate() const;
};

/// Signed values with a per-cell validity flag (boundary stencils are invalid).
struct SignedField {
  Grid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

/// Cell mask over a grid.
using Region = std::vector<std::uint8_t>;

void require_same_grid(const Grid& a, const Grid& b);

double lp_norm(const ScalarField& f, double p);
double superlevel_measure(const ScalarField& f, double mu);
SignedField discrete_laplacian(const ScalarField& f);

/// p * int_0^inf mu^{p-1} |{f >= mu}| dmu, evaluated exactly for the
/// piecewise-constant field: sum_j |{f >= v_j}| (v_j^p - v_{j-1}^p) over the
/// sorted distinct values.
double layer_cake_integral(const ScalarField& f, double p);

struct DominanceReport {
  bool holds = true;
  double worst_margin = 0.0;  // min of f - g over the checked cells
  std::size_t worst_cell = 0;
  Vec worst_point;
  std::size_t checked = 0;
};

/// f >= g - tol on every cell (of `region` when given).
DominanceReport dominates(const ScalarField& f, const ScalarField& g, double tol, const Region* region = nullptr);

ScalarField sample(const Grid& grid, const std::function<double(const Vec&)>& fn);
/// 1 on cells whose centre lies in center + scale K.
ScalarField indicator(const Grid& grid, const Body& body, double scale = 1.0, const Vec* center = nullptr);
/// max(0, 1 - gauge_K((x - center) / scale)).
ScalarField tent(const Grid& grid, const Body& body, double scale = 1.0, const Vec* center = nullptr);
/// Sum of two tents of heights 1 and `second_height` at +- offset along axis 0.
ScalarField two_bump(const Grid& grid, const Body& body, double scale, double offset, double second_height);

Region body_region(const Grid& grid, const Body& body, double scale = 1.0);
Region annulus_region(const Grid& grid, double r_inner, double r_outer);
/// Cells with lo[a] <= index[a] < hi[a].
Region window_region(const Grid& grid, const std::vector<int>& lo, const std::vector<int>& hi);
std::size_t region_count(const Region& region);

// Serialization: `<stem>.bin` holds little-endian float64 values in cell order,
// `<stem>.json` the geometry.
void write_field(const ScalarField& f, const std::string& stem);
std::string field_bytes(const ScalarField& f);
ScalarField read_field(const std::string& stem);
std::string grid_json(const Grid& grid);

/// CSV slice through the grid. 1-D: x,value. 2-D: x,y,value. 3-D: the plane
/// index `plane` along `axis` (default: middle plane of axis 2).
void write_slice_csv(const ScalarField& f, const std::string& path, int axis = -1, int plane = -1);
std::string slice_csv(const ScalarField& f, int axis = -1, int plane = -1);

}  // namespace hlmax
