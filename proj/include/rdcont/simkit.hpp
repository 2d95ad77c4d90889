// simkit.hpp: simulation designs and the Monte Carlo rejection-rate driver.
//
// All designs place the cut-off at zero. Draws are reproducible from
// (seed, repetition): repetition r always uses CounterRng(seed, r).
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rdcont/rng.hpp"
#include "rdcont/sign_test.hpp"

namespace rdcont {

namespace design {

/// D1: N(mu, 1).
struct Normal {
  double mu = 0.0;
};

/// D2: 2 Beta(2,4) - 1 with probability lambda, else 1 - 2 Beta(2,8).
struct BetaMixture {
  double lambda = 1.0;
};

/// D3: 0.4 N(-1, 1) + 0.1 N(-0.2, 0.2^2) + 0.5 N(3, 2.5^2); the second
/// parameters are standard deviations.
struct NormalMixture {};

/// D4: 0.75 on [-1,-kappa], linear ramp on [-kappa,kappa], 0.25 on [kappa,1].
struct Ramp {
  double kappa = 0.1;
};

/// D5: 0.25 on [-1,-kappa], plateau on [-kappa,kappa], 0.75 on [kappa,1].
/// The plateau has height 1 - right_share on [-kappa,0) and right_share on
/// [0,kappa]; right_share = 1/2 is the continuous design.
struct Plateau {
  double kappa = 0.1;
  double right_share = 0.5;
};

/// D6: Gaussian-kernel density estimate of a data column (already
/// normalized to the cut-off). bandwidth <= 0 selects 1.06 sd m^(-1/5).
struct Kde {
  std::shared_ptr<const std::vector<double>> source;
  double bandwidth = 0.0;
};

}  // namespace design

using DesignKind = std::variant<design::Normal, design::BetaMixture,
                                design::NormalMixture, design::Ramp,
                                design::Plateau, design::Kde>;

struct DesignSpec {
  DesignKind kind = design::Normal{};
  bool under_h1 = false;
  /// f+(0) / (f+(0) + f-(0)) when known analytically.
  std::optional<double> known_pi_f;

  static DesignSpec d1(double mu);
  static DesignSpec d2(double lambda);
  static DesignSpec d3();
  static DesignSpec d4(double kappa);
  static DesignSpec d5(double kappa, double right_share = 0.5);
  static DesignSpec d6(std::vector<double> normalized_source,
                       double bandwidth = 0.0);

  std::string label() const;
};

/// Throws InvalidParam for parameters outside the design's range.
void validate(const DesignSpec& spec);

/// Silverman-type rule 1.06 sd m^(-1/5). Throws DegenerateSample when the
/// source has fewer than two points or zero spread.
double silverman_bandwidth(std::span<const double> source);

/// Fills `out` with i.i.d. draws (no H1 perturbation).
void sample_design(const DesignSpec& spec, CounterRng& rng,
                   std::span<double> out);
std::vector<double> sample_design(const DesignSpec& spec, std::size_t n,
                                  std::uint64_t seed);

/// Each z in [0, 0.1] becomes -z with probability 0.2 - 2z.
void apply_h1_perturbation(std::span<double> values, CounterRng& rng);

/// Draws one repetition's normalized running variable.
using Sampler = std::function<void(CounterRng&, std::span<double>)>;

Sampler make_sampler(const DesignSpec& spec);

struct MCOptions {
  std::size_t n = 1000;
  std::size_t reps = 1000;
  std::uint64_t seed = kDefaultSeed;
  bool under_h1 = false;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

struct MCReport {
  std::string design;
  bool under_h1 = false;
  std::size_t n = 0;
  std::size_t reps = 0;
  double alpha = 0.0;
  std::string q_rule;
  std::optional<int> fixed_q;
  double rejection_rate_nonrandomized = 0.0;
  double rejection_rate_randomized = 0.0;
  double mean_q_used = 0.0;
  std::uint64_t seed = 0;
};

/// Rejection rates of both test variants under cfg.q_choice. cfg.randomized
/// and cfg.seed are ignored: each repetition derives its own draw.
MCReport mc_rejection_rate(const DesignSpec& spec, std::size_t n,
                           std::size_t reps, const TestConfig& cfg,
                           std::uint64_t seed, unsigned threads = 0);

MCReport mc_rejection_rate(const Sampler& sampler, std::string label,
                           const TestConfig& cfg, const MCOptions& opts);

/// S_n for each repetition with a fixed q.
std::vector<int> mc_sign_counts(const Sampler& sampler, int q,
                                const MCOptions& opts);

/// Total-variation distance between the empirical law of S_n and
/// Bi(q, known_pi_f). Throws MissingPiF without known_pi_f.
double empirical_pmf_check(const DesignSpec& spec, std::size_t n, int q,
                           std::size_t reps, std::uint64_t seed,
                           unsigned threads = 0);

/// Bi(q, p) pmf for small q (log-gamma form).
std::vector<double> binomial_pmf_table(int q, double p);

}  // namespace rdcont
