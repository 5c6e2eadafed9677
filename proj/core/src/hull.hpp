#pragma once

#include <vector>

#include "hlmax/body.hpp"

namespace hlmax::detail {

struct Hull {
  std::vector<Facet> facets;
  std::vector<std::vector<int>> fan;
};

/// Facets and a boundary triangulation of conv(points) for d <= 3. The origin
/// must be interior; throws Degenerate otherwise.
Hull convex_hull(const std::vector<Vec>& points);

}  // namespace hlmax::detail
