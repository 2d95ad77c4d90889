// gorder.cpp

#include "rdcont/gorder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rdcont/error.hpp"

namespace rdcont {
namespace {

struct Key {
  double magnitude;
  std::size_t index;

  friend bool operator<(const Key& lhs, const Key& rhs) noexcept {
    if (lhs.magnitude != rhs.magnitude) return lhs.magnitude < rhs.magnitude;
    return lhs.index < rhs.index;
  }
};

}  // namespace

Sample normalize_sample(std::span<const double> raw, double cutoff) {
  if (raw.empty()) throw Error(ErrorKind::EmptyData, "sample is empty");
  if (!std::isfinite(cutoff)) {
    throw Error(ErrorKind::InvalidParam, "cut-off must be finite");
  }
  Sample sample;
  sample.cutoff_original = cutoff;
  sample.values.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw Error(ErrorKind::NonFiniteValue,
                  "non-finite value at index " + std::to_string(i), i);
    }
    sample.values.push_back(raw[i] - cutoff);
  }
  return sample;
}

NearestSet select_q_nearest(const Sample& sample, int q) {
  const std::size_t n = sample.n();
  if (q < 1 || static_cast<std::size_t>(q) > n) {
    throw Error(ErrorKind::QOutOfRange,
                "q = " + std::to_string(q) + " outside [1, " +
                    std::to_string(n) + "]");
  }
  const auto count = static_cast<std::size_t>(q);

  std::vector<Key> keys(n);
  for (std::size_t i = 0; i < n; ++i) {
    keys[i] = {std::fabs(sample.values[i]), i};
  }
  // After nth_element, keys[count] is the (q+1)-th nearest and the first
  // `count` entries are the q nearest in unspecified order.
  if (count < n) std::nth_element(keys.begin(), keys.begin() + count, keys.end());
  std::sort(keys.begin(), keys.begin() + count);

  NearestSet out;
  out.q = q;
  out.selected.reserve(count);
  out.signs.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const double z = sample.values[keys[j].index];
    const bool treated = z >= 0.0;
    out.selected.push_back(z);
    out.signs.push_back(treated ? 1 : 0);
    out.s_n += treated ? 1 : 0;
    out.zero_count += z == 0.0 ? 1 : 0;
  }
  out.boundary_tie =
      count < n && keys[count].magnitude == keys[count - 1].magnitude;
  return out;
}

}  // namespace rdcont
