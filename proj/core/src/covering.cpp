#include "hlmax/covering.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "hlmax/error.hpp"

namespace hlmax {
namespace {

struct Fnv {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= c[i];
      h *= 1099511628211ull;
    }
  }
  void num(double v) {
    const auto b = std::bit_cast<std::uint64_t>(v);
    bytes(&b, sizeof b);
  }
};

}  // namespace

void CoverInput::validate() const {
  require(Lambda > 0.0, ErrorCode::InvalidArgument, "Lambda must be positive");
  for (std::size_t i = 0; i < items.size(); ++i) {
    require(items[i].center.size() == body.dim(), ErrorCode::DimensionMismatch,
            "cover item " + std::to_string(i) + " has a centre of the wrong dimension");
    require(items[i].lambda > 0.0 && items[i].lambda < Lambda, ErrorCode::InvalidArgument,
            "cover item " + std::to_string(i) + " needs 0 < lambda < Lambda");
  }
}

std::uint64_t CoverInput::fingerprint() const {
  Fnv f;
  const int d = body.dim();
  f.bytes(&d, sizeof d);
  const std::string kind = body.kind();
  f.bytes(kind.data(), kind.size());
  f.num(Lambda);
  for (const auto& it : items) {
    for (int a = 0; a < d; ++a) f.num(it.center(a));
    f.num(it.lambda);
  }
  return f.h;
}

bool CoverReport::all_covered() const {
  return std::all_of(covered.begin(), covered.end(), [](std::uint8_t c) { return c != 0; });
}

bool in_item(const Body& body, const CoverItem& item, const Vec& x) {
  return contains(body, (x - item.center) / item.lambda);
}

CoverReport greedy_cover(const CoverInput& input, const CoverOptions& options) {
  input.validate();
  const auto& items = input.items;
  const std::size_t n = items.size();
  CoverReport r;
  r.input_fingerprint = input.fingerprint();
  r.covered.assign(n, 0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return items[a].lambda > items[b].lambda; });
  for (std::size_t i : order) {
    bool inside = false;
    for (std::size_t s : r.selected)
      if (in_item(input.body, items[s], items[i].center)) {
        inside = true;
        break;
      }
    if (!inside) r.selected.push_back(i);
  }

  auto count = [&](const Vec& x) {
    int c = 0;
    for (std::size_t s : r.selected) c += in_item(input.body, items[s], x);
    return c;
  };
  auto record = [&](int c) {
    if (static_cast<std::size_t>(c) >= r.overlap_histogram.size()) r.overlap_histogram.resize(c + 1, 0);
    ++r.overlap_histogram[c];
    r.overlap_max = std::max(r.overlap_max, c);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const int c = count(items[i].center);
    r.covered[i] = c > 0;
    record(c);
  }

  if (options.probe_resolution > 0 && n > 0) {
    const int d = input.body.dim();
    const double reach = support_radius(input.body);
    Vec lo = items[0].center, hi = items[0].center;
    for (const auto& it : items) {
      lo = lo.cwiseMin(it.center - Vec::Constant(d, reach * it.lambda));
      hi = hi.cwiseMax(it.center + Vec::Constant(d, reach * it.lambda));
    }
    const int m = options.probe_resolution;
    std::vector<int> idx(d, 0);
    while (true) {
      Vec x(d);
      for (int a = 0; a < d; ++a) x(a) = lo(a) + (idx[a] + 0.5) * (hi(a) - lo(a)) / m;
      record(count(x));
      ++r.probe_points;
      int a = d - 1;
      while (a >= 0 && ++idx[a] == m) idx[a--] = 0;
      if (a < 0) break;
    }
  }
  return r;
}

int overlap_at(const CoverReport& report, const CoverInput& input, const Vec& x) {
  require(report.input_fingerprint == input.fingerprint(), ErrorCode::InvalidArgument,
          "cover report was not produced from this input");
  require(x.size() == input.body.dim(), ErrorCode::DimensionMismatch, "point dimension != body dimension");
  int c = 0;
  for (std::size_t s : report.selected) c += in_item(input.body, input.items[s], x);
  return c;
}

}  // namespace hlmax
