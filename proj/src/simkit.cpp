// simkit.cpp

#include "rdcont/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "rdcont/error.hpp"
#include "rdcont/format.hpp"
#include "rdcont/gorder.hpp"
#include "rdcont/q_select.hpp"

namespace rdcont {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Runs body(i) for i in [0, count) on a small pool. The first exception
// thrown by any worker is rethrown after all workers join.
template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed = true;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

double beta_draw(CounterRng& rng, double a, double b) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return x / (x + y);
}

double ramp_inverse_cdf(double p, double kappa) {
  const double left_mass = 0.75 * (1.0 - kappa);
  const double ramp_top = left_mass + kappa;
  if (p < left_mass) return -1.0 + p / 0.75;
  if (p < ramp_top) {
    // F(-kappa + u) = left_mass + 0.75 u - u^2 / (8 kappa), u in [0, 2 kappa];
    // smaller root in the cancellation-free form.
    const double r = p - left_mass;
    const double disc = std::max(0.0, 0.5625 - r / (2.0 * kappa));
    const double u = 2.0 * r / (0.75 + std::sqrt(disc));
    return -kappa + u;
  }
  return std::min(1.0, kappa + (p - ramp_top) / 0.25);
}

double plateau_inverse_cdf(double p, double kappa, double right_share) {
  const double left_height = 1.0 - right_share;
  const double outer_left = 0.25 * (1.0 - kappa);
  const double inner_left = outer_left + kappa * left_height;
  const double inner_right = outer_left + kappa;
  if (p < outer_left) return -1.0 + p / 0.25;
  if (p < inner_left) return -kappa + (p - outer_left) / left_height;
  if (p < inner_right) return (p - inner_left) / right_share;
  return std::min(1.0, kappa + (p - inner_right) / 0.75);
}

}  // namespace

DesignSpec DesignSpec::d1(double mu) {
  return {design::Normal{mu}, false, 0.5};
}
DesignSpec DesignSpec::d2(double lambda) {
  return {design::BetaMixture{lambda}, false, 0.5};
}
DesignSpec DesignSpec::d3() { return {design::NormalMixture{}, false, 0.5}; }
DesignSpec DesignSpec::d4(double kappa) {
  return {design::Ramp{kappa}, false, 0.5};
}
DesignSpec DesignSpec::d5(double kappa, double right_share) {
  return {design::Plateau{kappa, right_share}, false, right_share};
}
DesignSpec DesignSpec::d6(std::vector<double> normalized_source,
                          double bandwidth) {
  auto source =
      std::make_shared<const std::vector<double>>(std::move(normalized_source));
  return {design::Kde{std::move(source), bandwidth}, false, std::nullopt};
}

std::string DesignSpec::label() const {
  return std::visit(
      Overloaded{
          [](const design::Normal& d) {
            return "d1(mu=" + format_number(d.mu) + ")";
          },
          [](const design::BetaMixture& d) {
            return "d2(lambda=" + format_number(d.lambda) + ")";
          },
          [](const design::NormalMixture&) { return std::string("d3"); },
          [](const design::Ramp& d) {
            return "d4(kappa=" + format_number(d.kappa) + ")";
          },
          [](const design::Plateau& d) {
            std::string s = "d5(kappa=" + format_number(d.kappa);
            if (d.right_share != 0.5) {
              s += ",right_share=" + format_number(d.right_share);
            }
            return s + ")";
          },
          [](const design::Kde& d) {
            const std::size_t m = d.source ? d.source->size() : 0;
            return "d6(m=" + std::to_string(m) + ")";
          },
      },
      kind);
}

void validate(const DesignSpec& spec) {
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::InvalidParam, what);
  };
  std::visit(
      Overloaded{
          [&](const design::Normal& d) {
            if (!std::isfinite(d.mu)) fail("d1: mu must be finite");
          },
          [&](const design::BetaMixture& d) {
            if (!(d.lambda >= 0.0 && d.lambda <= 1.0)) {
              fail("d2: lambda must lie in [0, 1]");
            }
          },
          [](const design::NormalMixture&) {},
          [&](const design::Ramp& d) {
            if (!(d.kappa > 0.0 && d.kappa < 1.0)) {
              fail("d4: kappa must lie in (0, 1)");
            }
          },
          [&](const design::Plateau& d) {
            if (!(d.kappa > 0.0 && d.kappa < 1.0)) {
              fail("d5: kappa must lie in (0, 1)");
            }
            if (!(d.right_share > 0.0 && d.right_share < 1.0)) {
              fail("d5: right_share must lie in (0, 1)");
            }
          },
          [&](const design::Kde& d) {
            if (!d.source || d.source->empty()) fail("d6: empty source data");
            for (double v : *d.source) {
              if (!std::isfinite(v)) fail("d6: non-finite source value");
            }
            if (!std::isfinite(d.bandwidth) || d.bandwidth < 0.0) {
              fail("d6: bandwidth must be finite and >= 0");
            }
          },
      },
      spec.kind);
  if (spec.known_pi_f && !(*spec.known_pi_f >= 0.0 && *spec.known_pi_f <= 1.0)) {
    fail("known_pi_f must lie in [0, 1]");
  }
}

double silverman_bandwidth(std::span<const double> source) {
  const std::size_t m = source.size();
  if (m < 2) {
    throw Error(ErrorKind::DegenerateSample,
                "bandwidth rule needs at least two source points");
  }
  double mean = 0.0;
  for (double v : source) mean += v;
  mean /= static_cast<double>(m);
  double ss = 0.0;
  for (double v : source) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(m - 1));
  if (!(sd > 0.0)) {
    throw Error(ErrorKind::DegenerateSample, "source data has zero spread");
  }
  return 1.06 * sd * std::pow(static_cast<double>(m), -0.2);
}

Sampler make_sampler(const DesignSpec& spec) {
  validate(spec);
  return std::visit(
      Overloaded{
          [](const design::Normal& d) -> Sampler {
            return [d](CounterRng& rng, std::span<double> out) {
              std::normal_distribution<double> normal(d.mu, 1.0);
              for (double& z : out) z = normal(rng);
            };
          },
          [](const design::BetaMixture& d) -> Sampler {
            return [d](CounterRng& rng, std::span<double> out) {
              for (double& z : out) {
                if (rng.uniform() < d.lambda) {
                  z = 2.0 * beta_draw(rng, 2.0, 4.0) - 1.0;
                } else {
                  z = 1.0 - 2.0 * beta_draw(rng, 2.0, 8.0);
                }
              }
            };
          },
          [](const design::NormalMixture&) -> Sampler {
            return [](CounterRng& rng, std::span<double> out) {
              std::normal_distribution<double> normal(0.0, 1.0);
              for (double& z : out) {
                const double u = rng.uniform();
                const double e = normal(rng);
                if (u < 0.4) {
                  z = -1.0 + e;
                } else if (u < 0.5) {
                  z = -0.2 + 0.2 * e;
                } else {
                  z = 3.0 + 2.5 * e;
                }
              }
            };
          },
          [](const design::Ramp& d) -> Sampler {
            return [d](CounterRng& rng, std::span<double> out) {
              for (double& z : out) z = ramp_inverse_cdf(rng.uniform(), d.kappa);
            };
          },
          [](const design::Plateau& d) -> Sampler {
            return [d](CounterRng& rng, std::span<double> out) {
              for (double& z : out) {
                z = plateau_inverse_cdf(rng.uniform(), d.kappa, d.right_share);
              }
            };
          },
          [](const design::Kde& d) -> Sampler {
            const double h =
                d.bandwidth > 0.0 ? d.bandwidth : silverman_bandwidth(*d.source);
            return [source = d.source, h](CounterRng& rng, std::span<double> out) {
              std::uniform_int_distribution<std::size_t> pick(0, source->size() - 1);
              std::normal_distribution<double> noise(0.0, h);
              for (double& z : out) z = (*source)[pick(rng)] + noise(rng);
            };
          },
      },
      spec.kind);
}

void sample_design(const DesignSpec& spec, CounterRng& rng,
                   std::span<double> out) {
  make_sampler(spec)(rng, out);
}

std::vector<double> sample_design(const DesignSpec& spec, std::size_t n,
                                  std::uint64_t seed) {
  std::vector<double> out(n);
  CounterRng rng(seed, 0);
  sample_design(spec, rng, out);
  return out;
}

void apply_h1_perturbation(std::span<double> values, CounterRng& rng) {
  for (double& z : values) {
    if (z >= 0.0 && z <= 0.1 && rng.uniform() < 0.2 - 2.0 * z) z = -z;
  }
}

MCReport mc_rejection_rate(const Sampler& sampler, std::string label,
                           const TestConfig& cfg, const MCOptions& opts) {
  validate(cfg);
  if (opts.reps < 1) throw Error(ErrorKind::InvalidParam, "reps must be >= 1");
  if (opts.n < 1) throw Error(ErrorKind::InvalidParam, "n must be >= 1");

  std::vector<std::uint8_t> reject_nr(opts.reps);
  std::vector<std::uint8_t> reject_r(opts.reps);
  std::vector<int> q_used(opts.reps);

  parallel_for(opts.reps, opts.threads, [&](std::size_t rep) {
    CounterRng rng(opts.seed, rep);
    Sample sample;
    sample.values.resize(opts.n);
    sampler(rng, sample.values);
    if (opts.under_h1) apply_h1_perturbation(sample.values, rng);

    const QResolution resolved = resolve_q(sample, cfg);
    const NearestSet nearest = select_q_nearest(sample, resolved.q);
    TestConfig randomized = cfg;
    randomized.randomized = true;
    randomized.seed = rng();
    const TestResult r = evaluate_sign_count(nearest.s_n, resolved.q, randomized);
    reject_nr[rep] = rejects_nonrandomized(nearest.s_n, resolved.q, r.crit.b);
    reject_r[rep] = r.reject;
    q_used[rep] = resolved.q;
  });

  MCReport report;
  report.design = std::move(label);
  report.under_h1 = opts.under_h1;
  report.n = opts.n;
  report.reps = opts.reps;
  report.alpha = cfg.alpha;
  report.q_rule = to_string(cfg.q_choice.rule);
  if (cfg.q_choice.rule == QChoice::Rule::fixed) report.fixed_q = cfg.q_choice.q;
  report.seed = opts.seed;

  std::size_t count_nr = 0;
  std::size_t count_r = 0;
  long long q_total = 0;
  for (std::size_t i = 0; i < opts.reps; ++i) {
    count_nr += reject_nr[i];
    count_r += reject_r[i];
    q_total += q_used[i];
  }
  const double reps = static_cast<double>(opts.reps);
  report.rejection_rate_nonrandomized = count_nr / reps;
  report.rejection_rate_randomized = count_r / reps;
  report.mean_q_used = static_cast<double>(q_total) / reps;
  return report;
}

MCReport mc_rejection_rate(const DesignSpec& spec, std::size_t n,
                           std::size_t reps, const TestConfig& cfg,
                           std::uint64_t seed, unsigned threads) {
  MCOptions opts;
  opts.n = n;
  opts.reps = reps;
  opts.seed = seed;
  opts.under_h1 = spec.under_h1;
  opts.threads = threads;
  return mc_rejection_rate(make_sampler(spec), spec.label(), cfg, opts);
}

std::vector<int> mc_sign_counts(const Sampler& sampler, int q,
                                const MCOptions& opts) {
  if (q < 1 || static_cast<std::size_t>(q) > opts.n) {
    throw Error(ErrorKind::QOutOfRange, "q must lie in [1, n]");
  }
  std::vector<int> counts(opts.reps);
  parallel_for(opts.reps, opts.threads, [&](std::size_t rep) {
    CounterRng rng(opts.seed, rep);
    Sample sample;
    sample.values.resize(opts.n);
    sampler(rng, sample.values);
    if (opts.under_h1) apply_h1_perturbation(sample.values, rng);
    counts[rep] = select_q_nearest(sample, q).s_n;
  });
  return counts;
}

std::vector<double> binomial_pmf_table(int q, double p) {
  if (q < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorKind::InvalidParam, "binomial table needs q >= 0, p in [0,1]");
  }
  std::vector<double> pmf(static_cast<std::size_t>(q) + 1, 0.0);
  if (p == 0.0 || p == 1.0) {
    pmf[p == 0.0 ? 0 : q] = 1.0;
    return pmf;
  }
  const double log_p = std::log(p);
  const double log_1mp = std::log1p(-p);
  for (int k = 0; k <= q; ++k) {
    pmf[k] = std::exp(std::lgamma(q + 1.0) - std::lgamma(k + 1.0) -
                      std::lgamma(q - k + 1.0) + k * log_p + (q - k) * log_1mp);
  }
  return pmf;
}

double empirical_pmf_check(const DesignSpec& spec, std::size_t n, int q,
                           std::size_t reps, std::uint64_t seed,
                           unsigned threads) {
  if (!spec.known_pi_f) {
    throw Error(ErrorKind::MissingPiF,
                "design " + spec.label() + " has no analytic pi_f");
  }
  if (reps < 1) throw Error(ErrorKind::InvalidParam, "reps must be >= 1");
  MCOptions opts;
  opts.n = n;
  opts.reps = reps;
  opts.seed = seed;
  opts.under_h1 = spec.under_h1;
  opts.threads = threads;
  const std::vector<int> counts = mc_sign_counts(make_sampler(spec), q, opts);

  std::vector<double> empirical(static_cast<std::size_t>(q) + 1, 0.0);
  for (int s : counts) empirical[s] += 1.0;
  const std::vector<double> expected = binomial_pmf_table(q, *spec.known_pi_f);
  double tv = 0.0;
  for (int k = 0; k <= q; ++k) {
    tv += std::fabs(empirical[k] / static_cast<double>(reps) - expected[k]);
  }
  return 0.5 * tv;
}

}  // namespace rdcont
