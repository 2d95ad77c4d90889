// q_select.cpp

#include "rdcont/q_select.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "rdcont/binom.hpp"
#include "rdcont/error.hpp"

namespace rdcont {
namespace {

double normal_density(double x, double mu, double sigma) {
  const double d = (x - mu) / sigma;
  return std::exp(-0.5 * d * d) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

void check_scale(double mu, double sigma, double cutoff) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::DegenerateSample,
                "standard deviation must be positive and finite");
  }
  if (!std::isfinite(mu) || !std::isfinite(cutoff)) {
    throw Error(ErrorKind::InvalidParam, "mean and cut-off must be finite");
  }
}

}  // namespace

Moments sample_moments(const Sample& sample) {
  const std::size_t n = sample.n();
  if (n < 2) {
    throw Error(ErrorKind::DegenerateSample,
                "at least two observations are needed for a variance");
  }
  double mean = 0.0;
  for (double v : sample.values) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : sample.values) ss += (v - mean) * (v - mean);
  const double var = ss / static_cast<double>(n - 1);
  if (!(var > 0.0)) {
    throw Error(ErrorKind::DegenerateSample, "sample has zero variance");
  }
  return {mean + sample.cutoff_original, std::sqrt(var)};
}

int q_rot(long n, double mu, double sigma, double cutoff, double alpha) {
  check_alpha(alpha);
  check_scale(mu, sigma, cutoff);
  if (n < 1) throw Error(ErrorKind::InvalidParam, "n must be >= 1");

  // sigma * 4 phi^2(cutoff) / phi(mu + sigma) depends on (cutoff - mu)/sigma
  // only: 4 exp(1/2 - d^2) / sqrt(2 pi).
  const double d = (cutoff - mu) / sigma;
  const double scale =
      4.0 * std::exp(0.5 - d * d) / std::sqrt(2.0 * std::numbers::pi);
  const double rule = std::sqrt(static_cast<double>(n)) * std::cbrt(scale * scale);
  const int floor_q = min_admissible_q(alpha);
  if (!(rule > floor_q)) return floor_q;
  return static_cast<int>(std::ceil(rule));
}

QSelection q_irot(long n, double mu, double sigma, double cutoff,
                  double alpha) {
  QSelection sel;
  sel.mu_hat = mu;
  sel.sigma_hat = sigma;
  sel.q_rot = q_rot(n, mu, sigma, cutoff, alpha);
  sel.window = static_cast<int>(std::ceil(4.0 * std::log(sel.q_rot)));
  sel.lo = std::max(min_admissible_q(alpha), sel.q_rot - sel.window);
  sel.hi = sel.q_rot + sel.window;

  double best = -1.0;
  sel.curve.reserve(static_cast<std::size_t>(sel.hi - sel.lo + 1));
  for (int q = sel.lo; q <= sel.hi; ++q) {
    const BinomialContext ctx(q, alpha);
    const double value = binom_cdf(crit_b(ctx) - 1, q);
    sel.curve.emplace_back(q, value);
    if (value >= best) {
      best = value;
      sel.q_irot = q;
    }
  }
  if (sel.q_irot > n) {
    sel.warnings.push_back("informed rule of thumb q = " +
                           std::to_string(sel.q_irot) +
                           " exceeds sample size; clamped to n = " +
                           std::to_string(n));
    sel.q_irot = static_cast<int>(n);
  }
  return sel;
}

QSelection q_irot(const Sample& sample, double alpha) {
  const Moments m = sample_moments(sample);
  return q_irot(static_cast<long>(sample.n()), m.mean, m.sd,
                sample.cutoff_original, alpha);
}

BiasDiagnostics bias_diagnostics(long n, double q, double alpha,
                                 double lipschitz_ref, double density_ref) {
  check_alpha(alpha);
  if (!(lipschitz_ref > 0.0) || !(density_ref > 0.0) ||
      !std::isfinite(lipschitz_ref) || !std::isfinite(density_ref)) {
    throw Error(ErrorKind::InvalidReference,
                "reference density and Lipschitz constant must be positive");
  }
  if (n < 1 || !(q > 0.0)) {
    throw Error(ErrorKind::InvalidParam, "n and q must be positive");
  }
  BiasDiagnostics out;
  out.lipschitz_ref = lipschitz_ref;
  out.density_ref = density_ref;
  const double nd = static_cast<double>(n);
  const double ratio = 4.0 * density_ref * density_ref / lipschitz_ref;
  out.t_star = std::pow(q, 1.5) / nd / ratio;
  out.q_ast = std::pow(nd * out.t_star * ratio, 2.0 / 3.0);

  const boost::math::normal standard;
  const double z = boost::math::quantile(boost::math::complement(standard, 0.5 * alpha));
  out.size_approx = boost::math::cdf(standard, -z - out.t_star) +
                    boost::math::cdf(boost::math::complement(standard, z - out.t_star));
  return out;
}

BiasDiagnostics normal_reference_diagnostics(long n, double q, double alpha,
                                             double mu, double sigma,
                                             double cutoff) {
  check_scale(mu, sigma, cutoff);
  const double f = normal_density(cutoff, mu, sigma);
  const double lipschitz = normal_density(mu + sigma, mu, sigma) / sigma;
  return bias_diagnostics(n, q, alpha, lipschitz, f);
}

QResolution resolve_q(const Sample& sample, const TestConfig& cfg) {
  validate(cfg);
  QResolution out;
  switch (cfg.q_choice.rule) {
    case QChoice::Rule::fixed:
      out.q = cfg.q_choice.q;
      break;
    case QChoice::Rule::rot:
    case QChoice::Rule::irot: {
      QSelection sel = q_irot(sample, cfg.alpha);
      if (cfg.q_choice.rule == QChoice::Rule::irot) {
        out.q = sel.q_irot;
        out.warnings = sel.warnings;
      } else {
        out.q = sel.q_rot;
        if (static_cast<std::size_t>(out.q) > sample.n()) {
          out.warnings.push_back("rule of thumb q = " + std::to_string(out.q) +
                                 " exceeds sample size; clamped to n = " +
                                 std::to_string(sample.n()));
          out.q = static_cast<int>(sample.n());
        }
      }
      out.selection = std::move(sel);
      break;
    }
  }
  return out;
}

}  // namespace rdcont
