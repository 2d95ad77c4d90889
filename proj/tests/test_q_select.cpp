#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rdcont/binom.hpp"
#include "rdcont/error.hpp"
#include "rdcont/q_select.hpp"
#include "support/oracles.hpp"

using namespace rdcont;

namespace {

double phi(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi);
}

// Upper alpha/2 normal quantile by bisection on erfc.
double z_half(double alpha) {
  double lo = 0.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - oracle::normal_cdf(mid) > alpha / 2 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double size_oracle(double t, double alpha) {
  const double z = z_half(alpha);
  return oracle::normal_cdf(-z - t) + 1.0 - oracle::normal_cdf(z - t);
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no rdcont::Error thrown";
  return ErrorKind::ParseError;
}

}  // namespace

TEST(QRot, StandardNormalAtZero) {
  const double ratio = 4.0 * phi(0) * phi(0) / phi(1);
  EXPECT_NEAR(ratio, 2.6310, 1e-4);
  const int expected =
      static_cast<int>(std::ceil(std::sqrt(5000.0) * std::cbrt(ratio * ratio)));
  EXPECT_EQ(expected, 135);
  EXPECT_EQ(q_rot(5000, 0.0, 1.0, 0.0, 0.10), 135);
}

TEST(QRot, FloorBinds) {
  EXPECT_EQ(q_rot(1, 0.0, 1.0, 12.0, 0.05), 6);
  EXPECT_EQ(q_rot(1, 0.0, 1.0, 0.0, 0.01), 8);
}

TEST(QRot, AffineInvariance) {
  for (long n : {200L, 1000L, 5000L, 65000L}) {
    for (double cut : {-1.3, 0.0, 0.4, 2.0}) {
      const int ref = q_rot(n, 0.2, 1.1, cut, 0.05);
      EXPECT_EQ(q_rot(n, 0.2 + 3.5, 1.1, cut + 3.5, 0.05), ref);
      EXPECT_EQ(q_rot(n, 0.2 * 4.0, 1.1 * 4.0, cut * 4.0, 0.05), ref);
      EXPECT_EQ(q_rot(n, 0.2 * 0.125, 1.1 * 0.125, cut * 0.125, 0.05), ref);
    }
  }
}

TEST(QRot, Errors) {
  EXPECT_EQ(kind_of([] { q_rot(100, 0.0, 0.0, 0.0, 0.05); }),
            ErrorKind::DegenerateSample);
  EXPECT_EQ(kind_of([] { q_rot(100, 0.0, -1.0, 0.0, 0.05); }),
            ErrorKind::DegenerateSample);
  EXPECT_EQ(kind_of([] { q_rot(0, 0.0, 1.0, 0.0, 0.05); }),
            ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { q_rot(10, 0.0, 1.0, 0.0, 1.5); }),
            ErrorKind::InvalidAlpha);
}

TEST(QIrot, WindowArithmetic) {
  const auto sel = q_irot(5000, 0.0, 1.0, 0.0, 0.10);
  EXPECT_EQ(sel.q_rot, 135);
  EXPECT_EQ(sel.window, static_cast<int>(std::ceil(4.0 * std::log(135.0))));
  EXPECT_EQ(sel.window, 20);
  EXPECT_EQ(sel.lo, 115);
  EXPECT_EQ(sel.hi, 155);
  EXPECT_EQ(sel.q_irot, 147);
  EXPECT_EQ(sel.curve.size(), 41u);
  EXPECT_TRUE(sel.warnings.empty());
}

TEST(QIrot, ArgmaxOfCurveWithLargestTieBreak) {
  for (long n : {100L, 1000L, 5000L, 20000L}) {
    for (double alpha : {0.01, 0.05, 0.10}) {
      const auto sel = q_irot(n, 0.3, 1.0, 0.0, alpha);
      ASSERT_GE(sel.q_irot, sel.lo);
      ASSERT_LE(sel.q_irot, sel.hi);
      EXPECT_GE(sel.q_irot, min_admissible_q(alpha));
      double best = -1.0;
      int best_q = 0;
      double at_rot = -1.0;
      for (int q = sel.lo; q <= sel.hi; ++q) {
        const int b = crit_b(BinomialContext(q, alpha));
        const double v = binom_cdf(b - 1, q);
        if (v >= best) {
          best = v;
          best_q = q;
        }
        if (q == sel.q_rot) at_rot = v;
        EXPECT_EQ(sel.curve[static_cast<std::size_t>(q - sel.lo)].first, q);
        EXPECT_DOUBLE_EQ(sel.curve[static_cast<std::size_t>(q - sel.lo)].second,
                         v);
      }
      if (sel.q_irot <= n) {
        EXPECT_EQ(sel.q_irot, best_q) << n << " " << alpha;
        EXPECT_GE(best, at_rot);
      }
    }
  }
}

TEST(QIrot, LowerEndUsesFloor) {
  const auto sel = q_irot(30, 0.0, 1.0, 0.0, 0.05);
  EXPECT_EQ(sel.lo, std::max(6, sel.q_rot - sel.window));
  EXPECT_GE(sel.q_irot, 6);
}

TEST(QIrot, ClampedToSampleSize) {
  const auto sel = q_irot(20, 0.0, 1.0, 0.0, 0.05);
  EXPECT_LE(sel.q_irot, 20);
  // Unclamped argmax over [6, 14] is 9.
  const auto tiny = q_irot(7, 0.0, 1.0, 0.0, 0.05);
  EXPECT_EQ(tiny.q_irot, 7);
  ASSERT_EQ(tiny.warnings.size(), 1u);
}

TEST(QIrot, AffineInvarianceOnSamples) {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> nd(0.4, 1.3);
  std::vector<double> v(3000);
  for (auto& x : v) x = nd(gen);
  const auto ref = q_irot(normalize_sample(v, 0.1), 0.05);
  std::vector<double> w(v);
  for (auto& x : w) x = 2.5 * x - 7.0;
  const auto moved = q_irot(normalize_sample(w, 2.5 * 0.1 - 7.0), 0.05);
  EXPECT_EQ(moved.q_rot, ref.q_rot);
  EXPECT_EQ(moved.q_irot, ref.q_irot);
  EXPECT_NEAR(moved.mu_hat, 2.5 * ref.mu_hat - 7.0, 1e-9);
  EXPECT_NEAR(moved.sigma_hat, 2.5 * ref.sigma_hat, 1e-9);
}

TEST(QIrot, Deterministic) {
  const auto a = q_irot(4321, -0.2, 0.8, 0.1, 0.05);
  const auto b = q_irot(4321, -0.2, 0.8, 0.1, 0.05);
  EXPECT_EQ(a.q_irot, b.q_irot);
  EXPECT_EQ(a.curve, b.curve);
}

TEST(SampleMoments, Examples) {
  const std::vector<double> two{0.0, 2.0};
  const auto m = sample_moments(normalize_sample(two, 0.0));
  EXPECT_DOUBLE_EQ(m.mean, 1.0);
  EXPECT_DOUBLE_EQ(m.sd, std::sqrt(2.0));

  const std::vector<double> three{-1.0, 0.0, 1.0};
  const auto m3 = sample_moments(normalize_sample(three, 0.0));
  EXPECT_DOUBLE_EQ(m3.mean, 0.0);
  EXPECT_DOUBLE_EQ(m3.sd, 1.0);

  // Mean is reported on the original scale.
  const auto shifted = sample_moments(normalize_sample(two, 0.5));
  EXPECT_DOUBLE_EQ(shifted.mean, 1.0);

  const std::vector<double> flat{3.0, 3.0, 3.0};
  EXPECT_EQ(kind_of([&] { sample_moments(normalize_sample(flat, 0.0)); }),
            ErrorKind::DegenerateSample);
  const std::vector<double> one{3.0};
  EXPECT_EQ(kind_of([&] { sample_moments(normalize_sample(one, 0.0)); }),
            ErrorKind::DegenerateSample);
}

TEST(BiasDiagnostics, NormalReferenceSqrtRule) {
  const long n = 5000;
  const double f = phi(0.0);
  const double c = phi(1.0);
  const double q = std::sqrt(static_cast<double>(n)) *
                   std::cbrt(std::pow(4.0 * f * f / c, 2.0));
  const auto d = bias_diagnostics(n, q, 0.05, c, f);
  EXPECT_NEAR(d.t_star, std::pow(5000.0, -0.25), 1e-12);
  EXPECT_NEAR(d.t_star, 0.12, 0.0015);
  EXPECT_NEAR(d.size_approx, size_oracle(d.t_star, 0.05), 1e-12);
  EXPECT_NEAR(d.size_approx, 0.0516, 0.0002);
  EXPECT_NEAR(d.q_ast, q, 1e-9 * q);
  EXPECT_EQ(d.lipschitz_ref, c);
  EXPECT_EQ(d.density_ref, f);
}

TEST(BiasDiagnostics, NormalReferenceHelper) {
  const auto d = normal_reference_diagnostics(5000, 135, 0.05, 0.0, 1.0, 0.0);
  EXPECT_NEAR(d.density_ref, phi(0.0), 1e-15);
  EXPECT_NEAR(d.lipschitz_ref, phi(1.0), 1e-15);
  const auto s = normal_reference_diagnostics(5000, 135, 0.05, 0.0, 2.0, 0.0);
  EXPECT_NEAR(s.density_ref, phi(0.0) / 2.0, 1e-15);
  EXPECT_NEAR(s.lipschitz_ref, phi(1.0) / 4.0, 1e-15);
  // C / f^2 is scale-free, so t* does not depend on sigma at fixed q.
  EXPECT_NEAR(s.t_star, d.t_star, 1e-12);
}

TEST(BiasDiagnostics, SizeMatchesQuadratureOverGrid) {
  for (double alpha : {0.01, 0.05, 0.10}) {
    for (double t : {0.05, 0.12, 0.36, 1.0, 3.0}) {
      // With n = 1, q = 1 and f = 1/2, t_star equals C.
      const auto d = bias_diagnostics(1, 1.0, alpha, t, 0.5);
      EXPECT_NEAR(d.t_star, t, 1e-15);
      EXPECT_NEAR(d.size_approx, size_oracle(t, alpha), 1e-12);
      EXPECT_GE(d.size_approx, alpha);
    }
  }
}

TEST(BiasDiagnostics, ZeroBiasLimitIsAlpha) {
  const auto d = bias_diagnostics(1000000000L, 1.0, 0.05, 1e-12, 1.0);
  EXPECT_NEAR(d.t_star, 0.0, 1e-20);
  EXPECT_NEAR(d.size_approx, 0.05, 1e-12);
}

TEST(BiasDiagnostics, Errors) {
  EXPECT_EQ(kind_of([] { bias_diagnostics(100, 10, 0.05, 0.0, 1.0); }),
            ErrorKind::InvalidReference);
  EXPECT_EQ(kind_of([] { bias_diagnostics(100, 10, 0.05, 1.0, -1.0); }),
            ErrorKind::InvalidReference);
  EXPECT_EQ(kind_of([] { bias_diagnostics(0, 10, 0.05, 1.0, 1.0); }),
            ErrorKind::InvalidParam);
  EXPECT_EQ(kind_of([] { bias_diagnostics(100, 0, 0.05, 1.0, 1.0); }),
            ErrorKind::InvalidParam);
}

TEST(ResolveQ, Rules) {
  std::mt19937_64 gen(2);
  std::normal_distribution<double> nd;
  std::vector<double> v(5000);
  for (auto& x : v) x = nd(gen);
  const auto s = normalize_sample(v, 0.0);
  TestConfig cfg;
  cfg.alpha = 0.10;
  cfg.q_choice = QChoice::fixed(42);
  const auto fixed = resolve_q(s, cfg);
  EXPECT_EQ(fixed.q, 42);
  EXPECT_FALSE(fixed.selection.has_value());

  cfg.q_choice = QChoice::rot();
  const auto rot = resolve_q(s, cfg);
  ASSERT_TRUE(rot.selection.has_value());
  EXPECT_EQ(rot.q, rot.selection->q_rot);

  cfg.q_choice = QChoice::irot();
  const auto irot = resolve_q(s, cfg);
  ASSERT_TRUE(irot.selection.has_value());
  EXPECT_EQ(irot.q, irot.selection->q_irot);
  EXPECT_EQ(irot.selection->q_rot, rot.q);
}
