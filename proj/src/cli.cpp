// cli.cpp

#include "rdcont/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "rdcont/binom.hpp"
#include "rdcont/error.hpp"
#include "rdcont/format.hpp"
#include "rdcont/gorder.hpp"
#include "rdcont/io.hpp"
#include "rdcont/simkit.hpp"

namespace rdcont {
namespace {

struct DataFlags {
  std::string path;
  std::string column = "0";
  char delimiter = ',';
  bool no_header = false;
  std::string na = "error";
  double cutoff = 0.0;
};

void add_data_flags(CLI::App& cmd, DataFlags& f, bool required) {
  auto* data = cmd.add_option("--data", f.path, "CSV file with the running variable");
  if (required) data->required();
  cmd.add_option("--column", f.column, "column name, or zero-based index")
      ->capture_default_str();
  cmd.add_option("--cutoff", f.cutoff, "cut-off on the original scale")
      ->capture_default_str();
  cmd.add_option("--delimiter", f.delimiter, "field delimiter")->capture_default_str();
  cmd.add_flag("--no-header", f.no_header, "first line is data, not a header");
  cmd.add_option("--na", f.na, "missing-value policy")
      ->check(CLI::IsMember({"error", "drop"}))
      ->capture_default_str();
}

DataSource make_source(const DataFlags& f) {
  DataSource src;
  src.path = f.path;
  src.delimiter = f.delimiter;
  src.has_header = !f.no_header;
  src.na_policy = f.na == "drop" ? NaPolicy::drop_with_warning : NaPolicy::error;
  const bool numeric = !f.column.empty() &&
                       std::all_of(f.column.begin(), f.column.end(),
                                   [](char c) { return c >= '0' && c <= '9'; });
  if (numeric) {
    src.column = static_cast<std::size_t>(std::stoull(f.column));
  } else {
    src.column = f.column;
  }
  return src;
}

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t value) {
  if (flag->count() > 0) return value;
  if (const char* env = std::getenv("RDCONT_SEED")) {
    try {
      std::size_t used = 0;
      const auto parsed = std::stoull(env, &used, 10);
      if (used == std::string(env).size()) return parsed;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidParam, "RDCONT_SEED is not an unsigned integer");
  }
  return kDefaultSeed;
}

QChoice make_q_choice(const CLI::Option* q_flag, int q, const std::string& rule) {
  if (q_flag->count() > 0) return QChoice::fixed(q);
  return rule == "rot" ? QChoice::rot() : QChoice::irot();
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidAlpha:
    case ErrorKind::InvalidParam:
    case ErrorKind::InvalidReference:
    case ErrorKind::MissingPiF:
      return kExitUsage;
    default:
      return kExitData;
  }
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Approximate sign test for continuity of a density at a cut-off", "rdcont"};
  app.require_subcommand(1);

  // test
  auto* test = app.add_subcommand("test", "run the test on a data column");
  DataFlags test_data;
  add_data_flags(*test, test_data, true);
  double test_alpha = 0.05;
  int test_q = 0;
  std::string test_rule = "irot";
  bool test_randomized = false;
  std::uint64_t test_seed = kDefaultSeed;
  std::string test_format = "text";
  test->add_option("--alpha", test_alpha, "nominal level")->capture_default_str();
  auto* test_q_flag = test->add_option("--q", test_q, "fixed number of nearest observations");
  auto* test_rule_flag = test->add_option("--q-rule", test_rule, "data-dependent q")
                             ->check(CLI::IsMember({"rot", "irot"}))
                             ->capture_default_str();
  test_q_flag->excludes(test_rule_flag);
  test->add_flag("--randomized", test_randomized, "randomize on the critical boundary");
  auto* test_seed_flag = test->add_option("--seed", test_seed, "seed for the boundary draw");
  test->add_option("--format", test_format, "report format")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo rejection rates for a design");
  std::string design = "d1";
  double mu = 0.0, lambda = 1.0, kappa = 0.1, plateau_share = 0.5, bandwidth = 0.0;
  std::size_t sim_n = 1000, sim_reps = 1000;
  double sim_alpha = 0.05;
  int sim_q = 0;
  std::string sim_rule = "irot";
  bool h1 = false;
  std::uint64_t sim_seed = kDefaultSeed;
  unsigned threads = 0;
  std::string sim_out;
  DataFlags sim_data;
  sim->add_option("--design", design, "simulation design")
      ->check(CLI::IsMember({"d1", "d2", "d3", "d4", "d5", "d6"}))
      ->required();
  sim->add_option("--mu", mu, "d1 mean")->capture_default_str();
  sim->add_option("--lambda", lambda, "d2 mixing weight")->capture_default_str();
  sim->add_option("--kappa", kappa, "d4/d5 half-width")->capture_default_str();
  sim->add_option("--plateau-share", plateau_share, "d5 right share of the plateau")
      ->capture_default_str();
  sim->add_option("--bandwidth", bandwidth, "d6 kernel bandwidth (0 = rule of thumb)")
      ->capture_default_str();
  sim->add_option("--n", sim_n, "sample size")->capture_default_str();
  sim->add_option("--reps", sim_reps, "Monte Carlo repetitions")->capture_default_str();
  sim->add_option("--alpha", sim_alpha, "nominal level")->capture_default_str();
  auto* sim_q_flag = sim->add_option("--q", sim_q, "fixed q");
  auto* sim_rule_flag = sim->add_option("--q-rule", sim_rule, "data-dependent q")
                            ->check(CLI::IsMember({"rot", "irot"}))
                            ->capture_default_str();
  sim_q_flag->excludes(sim_rule_flag);
  sim->add_flag("--h1", h1, "apply the sign-flip alternative");
  auto* sim_seed_flag = sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--threads", threads, "worker threads (0 = all cores)");
  sim->add_option("--out", sim_out, "write a one-row CSV here instead of JSON");
  add_data_flags(*sim, sim_data, false);

  // curve
  auto* curve = app.add_subcommand("curve", "limiting null rejection curve 2 Psi_q(b-1)");
  double curve_alpha = 0.05;
  int q_min = 1, q_max = 150;
  std::string curve_out;
  curve->add_option("--alpha", curve_alpha, "nominal level")->capture_default_str();
  curve->add_option("--q-min", q_min, "first q")->capture_default_str();
  curve->add_option("--q-max", q_max, "last q")->capture_default_str();
  curve->add_option("--out", curve_out, "output CSV (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (test->parsed()) {
      TestConfig cfg;
      cfg.alpha = test_alpha;
      cfg.q_choice = make_q_choice(test_q_flag, test_q, test_rule);
      cfg.randomized = test_randomized;
      cfg.seed = resolve_seed(test_seed_flag, test_seed);
      validate(cfg);

      const LoadedData loaded = load_data(make_source(test_data));
      const Sample sample = normalize_sample(loaded.values, test_data.cutoff);
      RunReport report = analyze(sample, cfg);
      report.test.warnings.insert(report.test.warnings.begin(), loaded.warnings.begin(),
                                  loaded.warnings.end());
      if (test_format == "json") {
        out << to_json(report).dump(2) << '\n';
      } else {
        write_text(out, report);
      }
      return kExitOk;
    }

    if (sim->parsed()) {
      TestConfig cfg;
      cfg.alpha = sim_alpha;
      cfg.q_choice = make_q_choice(sim_q_flag, sim_q, sim_rule);
      validate(cfg);

      DesignSpec spec;
      if (design == "d1") spec = DesignSpec::d1(mu);
      if (design == "d2") spec = DesignSpec::d2(lambda);
      if (design == "d3") spec = DesignSpec::d3();
      if (design == "d4") spec = DesignSpec::d4(kappa);
      if (design == "d5") spec = DesignSpec::d5(kappa, plateau_share);
      if (design == "d6") {
        if (sim_data.path.empty()) {
          throw Error(ErrorKind::InvalidParam, "design d6 needs --data");
        }
        const LoadedData loaded = load_data(make_source(sim_data));
        for (const auto& w : loaded.warnings) err << "warning: " << w << '\n';
        Sample source = normalize_sample(loaded.values, sim_data.cutoff);
        spec = DesignSpec::d6(std::move(source.values), bandwidth);
      }
      spec.under_h1 = h1;

      const MCReport report = mc_rejection_rate(
          spec, sim_n, sim_reps, cfg, resolve_seed(sim_seed_flag, sim_seed), threads);
      if (!sim_out.empty()) {
        std::ofstream file(sim_out);
        if (!file) throw Error(ErrorKind::FileNotFound, "cannot write '" + sim_out + "'");
        write_csv(file, report);
      } else {
        out << to_json(report).dump(2) << '\n';
      }
      return kExitOk;
    }

    if (curve->parsed()) {
      const auto rows = null_rejection_curve(curve_alpha, q_min, q_max);
      if (!curve_out.empty()) {
        std::ofstream file(curve_out);
        if (!file) throw Error(ErrorKind::FileNotFound, "cannot write '" + curve_out + "'");
        write_curve_csv(file, rows);
      } else {
        write_curve_csv(out, rows);
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  }
  return kExitUsage;
}

}  // namespace rdcont
