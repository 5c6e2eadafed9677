#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hlmax/body.hpp"

namespace hlmax {

struct CoverItem {
  Vec center;
  double lambda;
};

struct CoverInput {
  Body body;
  double Lambda = 1.0;
  std::vector<CoverItem> items;

  void validate() const;
  std::uint64_t fingerprint() const;
};

struct CoverOptions {
  /// Probe points per axis over the bounding box of the family (0: none).
  int probe_resolution = 0;
};

struct CoverReport {
  std::vector<std::size_t> selected;  // in selection order
  std::vector<std::uint8_t> covered;  // per input center
  int overlap_max = 0;                // over centers and probes
  /// histogram[k]: number of evaluation points covered exactly k times.
  std::vector<std::size_t> overlap_histogram;
  std::size_t probe_points = 0;
  std::uint64_t input_fingerprint = 0;

  bool all_covered() const;
};

/// Largest dilation first (ties by index); an item is selected unless its
/// centre already lies in a selected set.
CoverReport greedy_cover(const CoverInput& input, const CoverOptions& options = {});

/// Number of selected sets containing x.
int overlap_at(const CoverReport& report, const CoverInput& input, const Vec& x);

/// Membership of x in center + lambda K.
bool in_item(const Body& body, const CoverItem& item, const Vec& x);

}  // namespace hlmax
