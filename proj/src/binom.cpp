// binom.cpp: fair-coin binomial pmf/CDF and critical values.

#include "rdcont/binom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <string>

#include "rdcont/error.hpp"
#include "rdcont/format.hpp"

namespace rdcont {
namespace {

constexpr double kLn2Pi = 1.8378770664093454835606594728112;

// stirlerr(n) = log(n!) - log(sqrt(2 pi n) (n/e)^n) for n = 0..15.
constexpr std::array<double, 16> kStirlerrSmall = {
    0.0,
    0.08106146679532725821967026,
    0.04134069595540929409382208,
    0.02767792568499833914878929,
    0.02079067210376509311152277,
    0.01664469118982119216319487,
    0.01387612882307074799874573,
    0.01189670994589177009505572,
    0.01041126526197209649747857,
    0.009255462182712732917728637,
    0.008330563433362871256469319,
    0.007573675487951840794972024,
    0.006942840107209529865664153,
    0.006408994188004207068439631,
    0.005951370112758847735624416,
    0.00555473355196280137103869,
};

double stirlerr(int n) {
  if (n < static_cast<int>(kStirlerrSmall.size())) return kStirlerrSmall[n];
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  const double x = n;
  const double xx = x * x;
  if (n > 500) return (s0 - s1 / xx) / x;
  if (n > 80) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// Deviance term x log(x/m) + m - x, evaluated by series near x = m.
double bd0(double x, double m) {
  if (std::fabs(x - m) < 0.1 * (x + m)) {
    double v = (x - m) / (x + m);
    double s = (x - m) * v;
    double ej = 2.0 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double next = s + ej / (2 * j + 1);
      if (next == s) return next;
      s = next;
    }
    return s;
  }
  return x * std::log(x / m) + m - x;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double term) {
    const double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      carry += (sum - t) + term;
    } else {
      carry += (term - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

// Psi_q(k) for 0 <= k <= q, summing downward from the largest term.
double lower_tail(int k, int q) {
  double term = binom_pmf(k, q);
  CompensatedSum acc;
  acc.add(term);
  for (int x = k; x >= 1; --x) {
    term *= static_cast<double>(x) / static_cast<double>(q - x + 1);
    acc.add(term);
    if (term <= acc.sum * 1e-18) break;
  }
  return acc.value();
}

}  // namespace

BinomialContext::BinomialContext(int q, double alpha) : q_(q), alpha_(alpha) {
  if (q < 1) {
    throw Error(ErrorKind::InvalidParam,
                "number of trials q must be >= 1, got " + std::to_string(q));
  }
  check_alpha(alpha);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidAlpha,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

double binom_pmf(int x, int q) {
  if (q < 0 || x < 0 || x > q) return 0.0;
  if (x == 0 || x == q) return std::ldexp(1.0, -q);
  const double n = q;
  const double half = 0.5 * n;
  const double lc = stirlerr(q) - stirlerr(x) - stirlerr(q - x) -
                    bd0(x, half) - bd0(n - x, half);
  const double lf = kLn2Pi + std::log(static_cast<double>(x)) +
                    std::log1p(-static_cast<double>(x) / n);
  return std::exp(lc - 0.5 * lf);
}

double binom_cdf(double b, int q) {
  if (std::isnan(b)) return b;
  if (b < 0.0) return 0.0;
  if (b >= static_cast<double>(q)) return 1.0;
  const int k = static_cast<int>(std::floor(b));
  if (2 * k + 1 == q) return 0.5;
  if (2 * k + 1 < q) return lower_tail(k, q);
  // Fair-coin symmetry: Psi_q(k) = 1 - Psi_q(q - k - 1).
  return 1.0 - lower_tail(q - k - 1, q);
}

double q_star(double alpha) {
  check_alpha(alpha);
  return 1.0 - std::log(alpha) / std::log(2.0);
}

int min_admissible_q(double alpha) {
  check_alpha(alpha);
  int q = 1;
  while (std::ldexp(1.0, 1 - q) > alpha) ++q;
  return q;
}

int crit_b(const BinomialContext& ctx) {
  const int q = ctx.q();
  const double half_alpha = 0.5 * ctx.alpha();

  // Ascending scan with a running sum of pmf terms.
  CompensatedSum psi;
  int b = q / 2;
  for (int candidate = 0; candidate <= q / 2; ++candidate) {
    const double below = psi.value();
    psi.add(binom_pmf(candidate, q));
    if (below <= half_alpha && half_alpha < psi.value()) {
      b = candidate;
      break;
    }
  }
  // Settle against binom_cdf so the sandwich holds for the public CDF.
  while (b > 0 && binom_cdf(b - 1, q) > half_alpha) --b;
  while (b < q / 2 && binom_cdf(b, q) <= half_alpha) ++b;
  return b;
}

double crit_a_raw(const BinomialContext& ctx, int b) {
  const int q = ctx.q();
  return (ctx.alpha() - 2.0 * binom_cdf(b - 1, q)) / (2.0 * binom_pmf(b, q));
}

double crit_a(const BinomialContext& ctx, int b) {
  return std::clamp(crit_a_raw(ctx, b), 0.0, 1.0 - 1e-15);
}

double crit_c(const BinomialContext& ctx, int b) {
  const double q = ctx.q();
  return std::sqrt(q) * (ctx.q() - 2 * b) / (2.0 * q);
}

CriticalValues critical_values(const BinomialContext& ctx) {
  CriticalValues cv;
  cv.q_star = q_star(ctx.alpha());
  cv.b = crit_b(ctx);
  cv.a = crit_a(ctx, cv.b);
  cv.c = crit_c(ctx, cv.b);
  cv.null_rej_nonrandomized = 2.0 * binom_cdf(cv.b - 1, ctx.q());
  return cv;
}

std::vector<CurveRow> null_rejection_curve(double alpha, int q_min,
                                           int q_max) {
  check_alpha(alpha);
  if (q_min < 1 || q_max < q_min) {
    throw Error(ErrorKind::InvalidParam,
                "curve range must satisfy 1 <= q_min <= q_max");
  }
  std::vector<CurveRow> rows;
  rows.reserve(static_cast<std::size_t>(q_max - q_min + 1));
  for (int q = q_min; q <= q_max; ++q) {
    const auto cv = critical_values(BinomialContext(q, alpha));
    rows.push_back({q, cv.b, cv.a, cv.c, cv.null_rej_nonrandomized});
  }
  return rows;
}

void write_curve_csv(std::ostream& out, std::span<const CurveRow> rows) {
  out << "q,b,a,c,null_rej\n";
  for (const auto& row : rows) {
    out << row.q << ',' << row.b << ',' << format_number(row.a) << ','
        << format_number(row.c) << ',' << format_number(row.null_rej) << '\n';
  }
}

}  // namespace rdcont
