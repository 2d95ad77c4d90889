// binom.hpp: Bi(q, 1/2) distribution and the sign test's critical values.
//
// Psi_q(b) is the CDF of a fair-coin binomial with q trials evaluated at
// floor(b). The critical constants follow from it:
//   b_q(alpha): unique b in {0..floor(q/2)} with Psi_q(b-1) <= alpha/2 < Psi_q(b)
//   a_q(alpha): randomization weight making the boundary test exact
//   c_q(alpha): critical value on the sqrt(q)|S/q - 1/2| scale
#pragma once

#include <iosfwd>
#include <span>
#include <vector>

namespace rdcont {

/// Number of trials and nominal level. Throws InvalidParam for q < 1 and
/// InvalidAlpha unless 0 < alpha < 1.
class BinomialContext {
 public:
  BinomialContext(int q, double alpha);

  int q() const noexcept { return q_; }
  double alpha() const noexcept { return alpha_; }

 private:
  int q_;
  double alpha_;
};

struct CriticalValues {
  double q_star = 0.0;
  int b = 0;
  double a = 0.0;
  double c = 0.0;
  /// 2 Psi_q(b - 1): limiting null rejection rate of the non-randomized test.
  double null_rej_nonrandomized = 0.0;
};

/// P{X = x} for X ~ Bi(q, 1/2); zero outside {0..q}. Relative accuracy is a
/// few ulps for all q (saddle-point deviance form, no cancellation).
double binom_pmf(int x, int q);

/// Psi_q(b). Total: 0 for b < 0, 1 for b >= q.
double binom_cdf(double b, int q);

/// Throws InvalidAlpha unless 0 < alpha < 1.
void check_alpha(double alpha);

/// 1 - log(alpha)/log(2).
double q_star(double alpha);

/// Smallest integer q with q >= q_star(alpha), decided exactly as
/// 2^(1-q) <= alpha.
int min_admissible_q(double alpha);

int crit_b(const BinomialContext& ctx);

/// 2^(q-1) C(q,b)^(-1) [alpha - 2 Psi_q(b-1)] without clamping.
double crit_a_raw(const BinomialContext& ctx, int b);

/// crit_a_raw clamped to [0, 1 - 1e-15].
double crit_a(const BinomialContext& ctx, int b);

double crit_c(const BinomialContext& ctx, int b);

CriticalValues critical_values(const BinomialContext& ctx);

struct CurveRow {
  int q = 0;
  int b = 0;
  double a = 0.0;
  double c = 0.0;
  double null_rej = 0.0;
};

/// One row per q in [q_min, q_max].
std::vector<CurveRow> null_rejection_curve(double alpha, int q_min, int q_max);

/// CSV with header `q,b,a,c,null_rej`, reals at 12 significant digits.
void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows);

}  // namespace rdcont
