#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rdcont/error.hpp"
#include "rdcont/gorder.hpp"

using namespace rdcont;

namespace {

Sample raw_sample(std::vector<double> v) { return normalize_sample(v, 0.0); }

// Brute force: full stable sort of indices by |z|.
std::vector<std::size_t> nearest_indices(const std::vector<double>& v, int q) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(v[a]) < std::fabs(v[b]);
  });
  idx.resize(static_cast<std::size_t>(q));
  return idx;
}

}  // namespace

TEST(NormalizeSample, Examples) {
  const std::vector<double> a{0.2, 0.7};
  const auto s = normalize_sample(a, 0.5);
  ASSERT_EQ(s.n(), 2u);
  EXPECT_NEAR(s.values[0], -0.3, 1e-15);
  EXPECT_NEAR(s.values[1], 0.2, 1e-15);
  EXPECT_EQ(s.cutoff_original, 0.5);

  const std::vector<double> b{1, 2, 3};
  EXPECT_EQ(normalize_sample(b, 0.0).values, b);

  const std::vector<double> c{0.5};
  EXPECT_EQ(normalize_sample(c, 0.5).values, std::vector<double>{0.0});
}

TEST(NormalizeSample, Errors) {
  const std::vector<double> empty;
  try {
    normalize_sample(empty, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyData);
  }
  const std::vector<double> bad{1.0, 2.0, std::numeric_limits<double>::quiet_NaN()};
  try {
    normalize_sample(bad, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonFiniteValue);
    EXPECT_EQ(e.location(), std::optional<std::size_t>{2});
  }
  const std::vector<double> inf{std::numeric_limits<double>::infinity()};
  EXPECT_THROW(normalize_sample(inf, 0.0), Error);
  const std::vector<double> ok{1.0};
  EXPECT_THROW(normalize_sample(ok, std::numeric_limits<double>::infinity()),
               Error);
}

TEST(SelectQNearest, HandExample) {
  const auto set = select_q_nearest(raw_sample({-0.3, 0.1, -0.05, 0.2, 0.4}), 3);
  ASSERT_EQ(set.selected.size(), 3u);
  EXPECT_EQ(set.selected, (std::vector<double>{-0.05, 0.1, 0.2}));
  EXPECT_EQ(set.signs, (std::vector<std::uint8_t>{0, 1, 1}));
  EXPECT_EQ(set.s_n, 2);
  EXPECT_EQ(set.q, 3);
  EXPECT_FALSE(set.boundary_tie);
  EXPECT_EQ(set.zero_count, 0);
}

TEST(SelectQNearest, AllNonNegative) {
  const auto s = raw_sample({0.3, 0.0, 1.2, 0.01, 5.0});
  for (int q = 1; q <= 5; ++q) EXPECT_EQ(select_q_nearest(s, q).s_n, q);
}

TEST(SelectQNearest, SymmetricPairTieFlag) {
  const auto s = raw_sample({0.1, -0.1, 0.2, -0.2, 0.3, -0.3});
  EXPECT_FALSE(select_q_nearest(s, 2).boundary_tie);
  EXPECT_TRUE(select_q_nearest(s, 3).boundary_tie);
  EXPECT_FALSE(select_q_nearest(s, 4).boundary_tie);
  EXPECT_FALSE(select_q_nearest(s, 6).boundary_tie);
}

TEST(SelectQNearest, TiesBrokenByInputOrder) {
  const auto first_neg = select_q_nearest(raw_sample({-0.1, 0.1, 0.5}), 1);
  EXPECT_EQ(first_neg.s_n, 0);
  const auto first_pos = select_q_nearest(raw_sample({0.1, -0.1, 0.5}), 1);
  EXPECT_EQ(first_pos.s_n, 1);
}

TEST(SelectQNearest, ZeroCountsAsTreated) {
  const auto set = select_q_nearest(raw_sample({0.0, -0.4, 0.0, 0.9}), 2);
  EXPECT_EQ(set.s_n, 2);
  EXPECT_EQ(set.zero_count, 2);
}

TEST(SelectQNearest, RangeErrors) {
  const auto s = raw_sample({1.0, 2.0});
  for (int q : {0, -1, 3}) {
    try {
      select_q_nearest(s, q);
      FAIL() << q;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::QOutOfRange);
    }
  }
}

TEST(SelectQNearest, MatchesBruteForceOnRandomInputs) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> nd;
  std::uniform_int_distribution<int> coarse(-20, 20);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + gen() % 200;
    std::vector<double> v(n);
    // Half the trials are rounded so ties are common.
    for (auto& x : v) x = trial % 2 ? nd(gen) : coarse(gen) / 10.0;
    const int q = 1 + static_cast<int>(gen() % n);
    const auto set = select_q_nearest(raw_sample(v), q);
    const auto idx = nearest_indices(v, q);
    int s = 0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      ASSERT_EQ(set.selected[j], v[idx[j]]) << trial;
      s += v[idx[j]] >= 0.0;
    }
    EXPECT_EQ(set.s_n, s);
    EXPECT_GE(set.s_n, 0);
    EXPECT_LE(set.s_n, q);
    const bool tie = static_cast<std::size_t>(q) < n && [&] {
      std::vector<double> mags(n);
      for (std::size_t i = 0; i < n; ++i) mags[i] = std::fabs(v[i]);
      std::sort(mags.begin(), mags.end());
      return mags[q - 1] == mags[q];
    }();
    EXPECT_EQ(set.boundary_tie, tie);
    for (std::size_t j = 1; j < set.selected.size(); ++j) {
      EXPECT_LE(std::fabs(set.selected[j - 1]), std::fabs(set.selected[j]));
    }
  }
}

TEST(SelectQNearest, FarObservationsDoNotChangeSelection) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  std::vector<double> v(500);
  for (auto& x : v) x = nd(gen);
  const int q = 40;
  const auto before = select_q_nearest(raw_sample(v), q);
  const double radius = std::fabs(before.selected.back());
  for (int k = 0; k < 100; ++k) {
    const double mag = radius * (1.01 + std::fabs(nd(gen)));
    v.insert(v.begin() + static_cast<long>(gen() % v.size()),
             k % 2 ? mag : -mag);
  }
  const auto after = select_q_nearest(raw_sample(v), q);
  EXPECT_EQ(after.selected, before.selected);
  EXPECT_EQ(after.s_n, before.s_n);
}

TEST(SelectQNearest, PermutationInvariantWithoutTies) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> nd;
  std::vector<double> v(300);
  for (auto& x : v) x = nd(gen);
  const auto ref = select_q_nearest(raw_sample(v), 25);
  for (int k = 0; k < 20; ++k) {
    std::shuffle(v.begin(), v.end(), gen);
    const auto set = select_q_nearest(raw_sample(v), 25);
    EXPECT_EQ(set.selected, ref.selected);
    EXPECT_EQ(set.s_n, ref.s_n);
  }
}

TEST(SelectQNearest, MassPointGivesAllTreated) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  for (int q : {1, 6, 20}) {
    std::vector<double> v(200);
    for (auto& x : v) x = ud(gen);
    for (int k = 0; k <= q; ++k) v[gen() % v.size()] = 0.0;
    // Collisions above may have hit the same slot; top up.
    while (std::count(v.begin(), v.end(), 0.0) < q + 1) v[gen() % v.size()] = 0.0;
    const auto set = select_q_nearest(raw_sample(v), q);
    EXPECT_EQ(set.s_n, q);
    EXPECT_EQ(set.zero_count, q);
    EXPECT_TRUE(set.boundary_tie);
  }
}
