// q_select.hpp: data-dependent choice of q and large-q bias diagnostics.
//
// The rule of thumb takes the normal reference N(mu, sigma^2) for both the
// density at the cut-off and its Lipschitz constant:
//   q_rot = ceil(max{q*(alpha), sqrt(n) (sigma 4 phi^2(cutoff) / phi(mu + sigma))^(2/3)})
// The informed rule then picks, within q_rot +/- ceil(4 ln q_rot), the q that
// maximizes Psi_q(b_q(alpha) - 1), i.e. a local peak of the limiting null
// rejection rate of the non-randomized test.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rdcont/gorder.hpp"
#include "rdcont/sign_test.hpp"

namespace rdcont {

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

/// Mean and (n-1)-denominator standard deviation on the original scale.
/// Throws DegenerateSample for n < 2 or zero variance.
Moments sample_moments(const Sample& sample);

struct QSelection {
  double mu_hat = 0.0;
  double sigma_hat = 0.0;
  int q_rot = 0;
  int window = 0;
  int lo = 0;
  int hi = 0;
  int q_irot = 0;
  /// (q, Psi_q(b_q(alpha) - 1)) for every q in [lo, hi].
  std::vector<std::pair<int, double>> curve;
  std::vector<std::string> warnings;
};

/// Throws DegenerateSample for sigma <= 0 and InvalidParam for n < 1.
int q_rot(long n, double mu, double sigma, double cutoff, double alpha);

/// Informed rule of thumb; ties in the argmax go to the largest q. If the
/// chosen q exceeds n it is clamped to n and a warning is recorded.
QSelection q_irot(long n, double mu, double sigma, double cutoff,
                  double alpha);

/// Convenience: moments from the sample, then q_irot.
QSelection q_irot(const Sample& sample, double alpha);

struct BiasDiagnostics {
  double lipschitz_ref = 0.0;
  double density_ref = 0.0;
  /// Worst-case ratio of bias to standard deviation, (q^{3/2}/n) C/(4 f^2).
  double t_star = 0.0;
  /// q that equates the worst bias ratio to t_star.
  double q_ast = 0.0;
  /// P{|zeta + t_star| > z_{alpha/2}}, zeta ~ N(0, 1).
  double size_approx = 0.0;
};

/// Throws InvalidReference for non-positive references and InvalidParam
/// for non-positive n or q.
BiasDiagnostics bias_diagnostics(long n, double q, double alpha,
                                 double lipschitz_ref, double density_ref);

/// Diagnostics with the normal references used by the rule of thumb:
/// f = phi_{mu,sigma}(cutoff), C = phi_{mu,sigma}(mu + sigma) / sigma.
BiasDiagnostics normal_reference_diagnostics(long n, double q, double alpha,
                                             double mu, double sigma,
                                             double cutoff);

struct QResolution {
  int q = 0;
  std::optional<QSelection> selection;
  std::vector<std::string> warnings;
};

/// Resolves cfg.q_choice against the sample. Fixed q is passed through
/// unchanged (range errors surface in select_q_nearest).
QResolution resolve_q(const Sample& sample, const TestConfig& cfg);

}  // namespace rdcont
