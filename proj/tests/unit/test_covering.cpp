#include <doctest.h>

#include <algorithm>
#include <bit>
#include <numeric>
#include <random>

#include "hlmax/covering.hpp"
#include "hlmax/error.hpp"
#include "hlmax/json_io.hpp"

using namespace hlmax;

namespace {

Vec v1(double a) { return (Vec(1) << a).finished(); }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an hlmax::Error");
  return ErrorCode::Numerical;
}

CoverInput intervals(const std::vector<std::pair<double, double>>& items, double Lambda = 3.0) {
  CoverInput in{Body::box({1.0}), Lambda, {}};
  for (auto [c, l] : items) in.items.push_back({v1(c), l});
  return in;
}

// Reference greedy for closed intervals [c - l, c + l].
std::vector<std::size_t> brute_greedy(const std::vector<std::pair<double, double>>& items) {
  std::vector<std::size_t> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return items[a].second > items[b].second; });
  std::vector<std::size_t> sel;
  for (auto i : order) {
    bool inside = false;
    for (auto s : sel) inside |= std::abs(items[i].first - items[s].first) <= items[s].second;
    if (!inside) sel.push_back(i);
  }
  return sel;
}

int brute_overlap(const std::vector<std::pair<double, double>>& items, const std::vector<std::size_t>& sel, double x) {
  int n = 0;
  for (auto s : sel) n += std::abs(x - items[s].first) <= items[s].second;
  return n;
}

int random_family_overlap(std::mt19937_64& rng, const Body& k, int size) {
  std::uniform_real_distribution<double> u(0, 1), lam(0.02, 0.2);
  CoverInput in{k, 1.0, {}};
  for (int i = 0; i < size; ++i) in.items.push_back({(Vec(2) << u(rng), u(rng)).finished(), lam(rng)});
  CoverOptions opt;
  opt.probe_resolution = 64;
  const CoverReport r = greedy_cover(in, opt);
  REQUIRE(r.all_covered());
  return r.overlap_max;
}

}  // namespace

TEST_CASE("cover examples") {
  const auto one = greedy_cover(intervals({{0.0, 1.0}}));
  CHECK(one.selected == std::vector<std::size_t>{0});
  CHECK(one.overlap_max == 1);

  const CoverInput three = intervals({{0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}});
  const auto r = greedy_cover(three);
  CHECK(r.selected == std::vector<std::size_t>{0});
  CHECK(r.all_covered());
  CHECK(r.overlap_max == 1);
  CHECK(overlap_at(r, three, v1(0.5)) == 1);
  CHECK(overlap_at(r, three, v1(5.0)) == 0);
  CHECK(overlap_at(r, three, v1(0.0)) >= 1);

  const auto apart = greedy_cover(intervals({{0.0, 1.0}, {3.0, 1.0}}));
  CHECK(apart.selected.size() == 2);
  CHECK(apart.overlap_max == 1);
}

TEST_CASE("largest dilation is selected first, ties by index") {
  const CoverInput in = intervals({{0.0, 0.5}, {0.3, 2.0}, {5.0, 2.0}, {4.0, 1.0}});
  const auto r = greedy_cover(in);
  CHECK(r.selected == std::vector<std::size_t>{1, 2});
}

TEST_CASE("1-D greedy covers agree with brute force on all small subfamilies") {
  std::vector<std::pair<double, double>> pool;
  for (double c : {0.0, 1.0, 2.0})
    for (double l : {0.5, 1.0, 2.0}) pool.push_back({c, l});
  const int n = static_cast<int>(pool.size());
  int families = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > 6) continue;
    std::vector<std::pair<double, double>> items;
    for (int i = 0; i < n; ++i)
      if (mask >> i & 1u) items.push_back(pool[i]);
    ++families;
    const CoverInput in = intervals(items);
    const auto r = greedy_cover(in);
    const auto sel = brute_greedy(items);
    CHECK(r.selected == sel);
    CHECK(r.all_covered());
    int worst = 0;
    for (const auto& it : items) {
      const int b = brute_overlap(items, sel, it.first);
      CHECK(overlap_at(r, in, v1(it.first)) == b);
      CHECK(b >= 1);
      worst = std::max(worst, b);
    }
    CHECK(r.overlap_max >= worst);
    CHECK(r.overlap_max <= 2);
  }
  CHECK(families == 465);
}

TEST_CASE("1-D overlap never exceeds two") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 200);
  std::uniform_real_distribution<double> c(0, 10), l(0.01, 1.0);
  CoverOptions opt;
  opt.probe_resolution = 256;
  int worst = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CoverInput in{Body::box({1.0}), 2.0, {}};
    const int n = size(rng);
    for (int i = 0; i < n; ++i) in.items.push_back({v1(c(rng)), l(rng)});
    const auto r = greedy_cover(in, opt);
    CHECK(r.all_covered());
    for (std::size_t i = 1; i < r.selected.size(); ++i)
      CHECK(in.items[r.selected[i]].lambda <= in.items[r.selected[i - 1]].lambda);
    const std::size_t points = std::accumulate(r.overlap_histogram.begin(), r.overlap_histogram.end(), std::size_t{0});
    CHECK(points == in.items.size() + r.probe_points);
    worst = std::max(worst, r.overlap_max);
  }
  CHECK(worst <= 2);
}

TEST_CASE("2-D overlap does not grow with the family") {
  for (const Body& k : {Body::ball(2, 1.0), Body::box({1.0, 1.0})}) {
    std::mt19937_64 rng(k.as<Ball>() ? 31 : 32);
    std::vector<int> worst;
    for (int size : {200, 400, 800}) {
      int w = 0;
      for (int trial = 0; trial < 6; ++trial) w = std::max(w, random_family_overlap(rng, k, size));
      worst.push_back(w);
    }
    MESSAGE("overlap by size " << worst[0] << " " << worst[1] << " " << worst[2]);
    CHECK(worst[1] <= worst[0]);
    CHECK(worst[2] <= worst[1]);
  }
}

TEST_CASE("cover input validation and fingerprints") {
  CHECK(code_of([] { greedy_cover(intervals({{0.0, 3.0}}, 3.0)); }) == ErrorCode::InvalidArgument);
  CoverInput bad{Body::ball(2, 1.0), 1.0, {{v1(0.0), 0.5}}};
  CHECK(code_of([&] { greedy_cover(bad); }) == ErrorCode::DimensionMismatch);

  const CoverInput a = intervals({{0.0, 1.0}, {2.5, 0.5}});
  const CoverInput b = intervals({{0.0, 1.0}, {2.5, 0.25}});
  const auto ra = greedy_cover(a);
  CHECK(a.fingerprint() != b.fingerprint());
  CHECK(code_of([&] { overlap_at(ra, b, v1(0.0)); }) == ErrorCode::InvalidArgument);

  const CoverInput back = cover_input_from_json(cover_input_to_json(a));
  CHECK(back.fingerprint() == a.fingerprint());
}
