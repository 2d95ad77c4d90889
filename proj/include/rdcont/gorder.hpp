// gorder.hpp: cut-off normalization and the q observations nearest to it.
//
// Observations are ordered by g(z) = |z| on the normalized scale. Equal
// |z| are broken by original index (earlier first), so selection is a pure
// function of the input sequence.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace rdcont {

/// Running variable shifted so the cut-off sits at zero.
struct Sample {
  std::vector<double> values;
  double cutoff_original = 0.0;

  std::size_t n() const noexcept { return values.size(); }
};

/// values = raw - cutoff. Throws EmptyData, NonFiniteValue (with index) or
/// InvalidParam for a non-finite cut-off.
Sample normalize_sample(std::span<const double> raw, double cutoff);

struct NearestSet {
  /// Normalized values, ascending in |z|.
  std::vector<double> selected;
  /// I{z >= 0} for each selected value; an exact zero counts as treated.
  std::vector<std::uint8_t> signs;
  int q = 0;
  int s_n = 0;
  /// |z| of the q-th and (q+1)-th nearest coincide.
  bool boundary_tie = false;
  /// Selected values exactly at the cut-off.
  int zero_count = 0;
};

/// Partial selection, O(n + q log q). Throws QOutOfRange unless 1 <= q <= n.
NearestSet select_q_nearest(const Sample& sample, int q);

}  // namespace rdcont
