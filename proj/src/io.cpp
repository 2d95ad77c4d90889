// io.cpp

#include "rdcont/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <string_view>

#include "rdcont/error.hpp"
#include "rdcont/format.hpp"

namespace rdcont {
namespace {

using nlohmann::json;

// Splits one CSV record. Double quotes enclose fields; "" is a literal quote.
std::vector<std::string> split_record(std::string_view line, char delimiter) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == delimiter) {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  return fields;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool is_missing_token(const std::string& token) {
  return token.empty() || token == "NA" || token == "na" || token == "NaN" ||
         token == "nan" || token == ".";
}

json selection_json(const QSelection& sel) {
  json curve = json::array();
  for (const auto& [q, psi] : sel.curve) curve.push_back({{"q", q}, {"psi", psi}});
  return {{"mu_hat", sel.mu_hat},       {"sigma_hat", sel.sigma_hat},
          {"q_rot", sel.q_rot},         {"window", sel.window},
          {"neighborhood", {sel.lo, sel.hi}},
          {"q_irot", sel.q_irot},       {"curve", std::move(curve)},
          {"warnings", sel.warnings}};
}

QSelection selection_from_json(const json& j) {
  QSelection sel;
  sel.mu_hat = j.at("mu_hat").get<double>();
  sel.sigma_hat = j.at("sigma_hat").get<double>();
  sel.q_rot = j.at("q_rot").get<int>();
  sel.window = j.at("window").get<int>();
  sel.lo = j.at("neighborhood").at(0).get<int>();
  sel.hi = j.at("neighborhood").at(1).get<int>();
  sel.q_irot = j.at("q_irot").get<int>();
  for (const auto& point : j.at("curve")) {
    sel.curve.emplace_back(point.at("q").get<int>(), point.at("psi").get<double>());
  }
  sel.warnings = j.at("warnings").get<std::vector<std::string>>();
  return sel;
}

json diagnostics_json(const BiasDiagnostics& d) {
  return {{"lipschitz_ref", d.lipschitz_ref}, {"density_ref", d.density_ref},
          {"t_star", d.t_star},               {"q_ast", d.q_ast},
          {"size_approx", d.size_approx}};
}

BiasDiagnostics diagnostics_from_json(const json& j) {
  BiasDiagnostics d;
  d.lipschitz_ref = j.at("lipschitz_ref").get<double>();
  d.density_ref = j.at("density_ref").get<double>();
  d.t_star = j.at("t_star").get<double>();
  d.q_ast = j.at("q_ast").get<double>();
  d.size_approx = j.at("size_approx").get<double>();
  return d;
}

}  // namespace

LoadedData load_data(const DataSource& src) {
  std::ifstream in(src.path);
  if (!in) {
    throw Error(ErrorKind::FileNotFound,
                "cannot open data file '" + src.path.string() + "'");
  }

  std::string line;
  std::size_t line_no = 0;
  std::size_t column = 0;

  if (src.has_header) {
    if (!std::getline(in, line)) {
      throw Error(ErrorKind::EmptyAfterFiltering, "data file is empty");
    }
    ++line_no;
    const auto header = split_record(line, src.delimiter);
    if (const auto* name = std::get_if<std::string>(&src.column)) {
      const auto it = std::find_if(header.begin(), header.end(),
                                   [&](const std::string& h) { return trim(h) == *name; });
      if (it == header.end()) {
        throw Error(ErrorKind::ColumnNotFound,
                    "column '" + *name + "' not found in header");
      }
      column = static_cast<std::size_t>(it - header.begin());
    } else {
      column = std::get<std::size_t>(src.column);
      if (column >= header.size()) {
        throw Error(ErrorKind::ColumnNotFound,
                    "column index " + std::to_string(column) + " beyond header width " +
                        std::to_string(header.size()));
      }
    }
  } else if (const auto* name = std::get_if<std::string>(&src.column)) {
    throw Error(ErrorKind::ColumnNotFound,
                "column '" + *name + "' requested by name but the file has no header");
  } else {
    column = std::get<std::size_t>(src.column);
  }

  LoadedData out;
  std::size_t dropped = 0;
  std::size_t first_dropped_line = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto fields = split_record(line, src.delimiter);
    std::string token = column < fields.size() ? trim(fields[column]) : std::string();
    const bool short_row = column >= fields.size() && !trim(line).empty();

    std::optional<double> value;
    if (!short_row && !is_missing_token(token)) value = parse_number(token);
    const bool missing = !value || !std::isfinite(*value);

    if (missing) {
      if (src.na_policy == NaPolicy::error) {
        std::string what = short_row ? "row has no column " + std::to_string(column)
                           : is_missing_token(token) ? "missing value"
                           : "cannot parse '" + token + "' as a number";
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line_no) + ": " + what, line_no);
      }
      if (dropped++ == 0) first_dropped_line = line_no;
      continue;
    }
    out.values.push_back(*value);
  }

  if (dropped > 0) {
    out.warnings.push_back("dropped " + std::to_string(dropped) +
                           " row(s) with missing or non-numeric values (first at line " +
                           std::to_string(first_dropped_line) + ")");
  }
  if (out.values.empty()) {
    throw Error(ErrorKind::EmptyAfterFiltering, "no numeric values in selected column");
  }
  return out;
}

DataSummary summarize(const Sample& sample) {
  DataSummary s;
  s.n = sample.n();
  if (s.n == 0) return s;
  const auto [lo, hi] = std::minmax_element(sample.values.begin(), sample.values.end());
  s.min = *lo + sample.cutoff_original;
  s.max = *hi + sample.cutoff_original;
  for (double z : sample.values) {
    if (z >= 0.0) {
      ++s.count_at_or_above;
    } else {
      ++s.count_below_cutoff;
    }
  }
  return s;
}

RunReport analyze(const Sample& sample, const TestConfig& cfg) {
  RunReport report;
  report.cutoff = sample.cutoff_original;
  report.q_rule = to_string(cfg.q_choice.rule);
  report.data_summary = summarize(sample);

  QResolution resolved = resolve_q(sample, cfg);
  report.test = run_test(sample, cfg, resolved.q);
  report.test.warnings.insert(report.test.warnings.begin(), resolved.warnings.begin(),
                              resolved.warnings.end());
  report.q_selection = std::move(resolved.selection);

  try {
    const Moments m = report.q_selection
                          ? Moments{report.q_selection->mu_hat, report.q_selection->sigma_hat}
                          : sample_moments(sample);
    report.diagnostics = normal_reference_diagnostics(
        static_cast<long>(sample.n()), report.test.q_used, cfg.alpha, m.mean, m.sd,
        sample.cutoff_original);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DegenerateSample && e.kind() != ErrorKind::InvalidReference) {
      throw;
    }
  }
  return report;
}

json to_json(const RunReport& report) {
  const TestResult& t = report.test;
  json j = {
      {"alpha", t.alpha},
      {"q_rule", report.q_rule},
      {"q_used", t.q_used},
      {"s_n", t.s_n},
      {"t_stat", t.t_stat},
      {"b", t.crit.b},
      {"a", t.crit.a},
      {"c", t.crit.c},
      {"q_star", t.crit.q_star},
      {"null_rej_nonrandomized", t.crit.null_rej_nonrandomized},
      {"p_value", t.p_value},
      {"reject", t.reject},
      {"randomized", t.randomized},
      {"seed", t.seed},
      {"on_boundary", t.on_boundary},
      {"rand_draw", t.rand_draw ? json(*t.rand_draw) : json(nullptr)},
      {"warnings", t.warnings},
      {"nearest",
       {{"q", t.nearest.q},
        {"s_n", t.nearest.s_n},
        {"boundary_tie", t.nearest.boundary_tie},
        {"zero_count", t.nearest.zero_count}}},
      {"cutoff", report.cutoff},
      {"data_summary",
       {{"n", report.data_summary.n},
        {"min", report.data_summary.min},
        {"max", report.data_summary.max},
        {"count_below_cutoff", report.data_summary.count_below_cutoff},
        {"count_at_or_above", report.data_summary.count_at_or_above}}},
  };
  j["q_selection"] = report.q_selection ? selection_json(*report.q_selection) : json(nullptr);
  j["diagnostics"] = report.diagnostics ? diagnostics_json(*report.diagnostics) : json(nullptr);
  return j;
}

RunReport run_report_from_json(const json& j) {
  RunReport r;
  TestResult& t = r.test;
  t.alpha = j.at("alpha").get<double>();
  r.q_rule = j.at("q_rule").get<std::string>();
  t.q_used = j.at("q_used").get<int>();
  t.s_n = j.at("s_n").get<int>();
  t.t_stat = j.at("t_stat").get<double>();
  t.crit.b = j.at("b").get<int>();
  t.crit.a = j.at("a").get<double>();
  t.crit.c = j.at("c").get<double>();
  t.crit.q_star = j.at("q_star").get<double>();
  t.crit.null_rej_nonrandomized = j.at("null_rej_nonrandomized").get<double>();
  t.p_value = j.at("p_value").get<double>();
  t.reject = j.at("reject").get<bool>();
  t.randomized = j.at("randomized").get<bool>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.on_boundary = j.at("on_boundary").get<bool>();
  if (!j.at("rand_draw").is_null()) t.rand_draw = j.at("rand_draw").get<double>();
  t.warnings = j.at("warnings").get<std::vector<std::string>>();
  const json& nearest = j.at("nearest");
  t.nearest.q = nearest.at("q").get<int>();
  t.nearest.s_n = nearest.at("s_n").get<int>();
  t.nearest.boundary_tie = nearest.at("boundary_tie").get<bool>();
  t.nearest.zero_count = nearest.at("zero_count").get<int>();
  r.cutoff = j.at("cutoff").get<double>();
  const json& summary = j.at("data_summary");
  r.data_summary.n = summary.at("n").get<std::size_t>();
  r.data_summary.min = summary.at("min").get<double>();
  r.data_summary.max = summary.at("max").get<double>();
  r.data_summary.count_below_cutoff = summary.at("count_below_cutoff").get<std::size_t>();
  r.data_summary.count_at_or_above = summary.at("count_at_or_above").get<std::size_t>();
  if (!j.at("q_selection").is_null()) r.q_selection = selection_from_json(j.at("q_selection"));
  if (!j.at("diagnostics").is_null()) r.diagnostics = diagnostics_from_json(j.at("diagnostics"));
  return r;
}

void write_text(std::ostream& out, const RunReport& report) {
  const TestResult& t = report.test;
  const DataSummary& d = report.data_summary;
  auto num = [](double v) { return format_number(v); };

  out << "Approximate sign test for continuity of the density at the cut-off\n";
  out << "  observations      " << d.n << " (below cut-off " << d.count_below_cutoff
      << ", at or above " << d.count_at_or_above << ")\n";
  out << "  range             [" << num(d.min) << ", " << num(d.max) << "]\n";
  out << "  cut-off           " << num(report.cutoff) << "\n";
  out << "  q rule            " << report.q_rule;
  if (report.q_selection) {
    const QSelection& s = *report.q_selection;
    out << " (q_rot " << s.q_rot << ", neighborhood [" << s.lo << ", " << s.hi
        << "], q_irot " << s.q_irot << ")";
  }
  out << "\n";
  out << "  q                 " << t.q_used << "\n";
  out << "  S_n               " << t.s_n << "\n";
  out << "  T                 " << num(t.t_stat) << "\n";
  out << "  b, a, c           " << t.crit.b << ", " << num(t.crit.a) << ", "
      << num(t.crit.c) << "\n";
  out << "  p-value           " << num(t.p_value) << "\n";
  out << "  alpha             " << num(t.alpha) << "\n";
  out << "  randomized        " << (t.randomized ? "yes" : "no");
  if (t.randomized) out << " (seed " << t.seed << ")";
  out << "\n";
  if (t.rand_draw) out << "  boundary draw     " << num(*t.rand_draw) << "\n";
  if (report.diagnostics) {
    out << "  bias ratio t*     " << num(report.diagnostics->t_star)
        << " (approx. size " << num(report.diagnostics->size_approx) << ")\n";
  }
  out << "  decision          " << (t.reject ? "reject" : "fail to reject") << "\n";
  for (const auto& w : t.warnings) out << "warning: " << w << "\n";
}

nlohmann::json to_json(const MCReport& r) {
  return {{"design", r.design},
          {"under_h1", r.under_h1},
          {"n", r.n},
          {"reps", r.reps},
          {"alpha", r.alpha},
          {"q_rule", r.q_rule},
          {"q", r.fixed_q ? json(*r.fixed_q) : json(nullptr)},
          {"rejection_rate_nonrandomized", r.rejection_rate_nonrandomized},
          {"rejection_rate_randomized", r.rejection_rate_randomized},
          {"as_nr", 100.0 * r.rejection_rate_nonrandomized},
          {"as_r", 100.0 * r.rejection_rate_randomized},
          {"mean_q", r.mean_q_used},
          {"seed", r.seed}};
}

void write_csv(std::ostream& out, const MCReport& r) {
  out << "design,h1,n,reps,alpha,q_rule,q,as_nr,as_r,mean_q,seed\n";
  out << '"' << r.design << '"' << ',' << (r.under_h1 ? 1 : 0) << ',' << r.n << ','
      << r.reps << ',' << format_number(r.alpha) << ',' << r.q_rule << ','
      << (r.fixed_q ? std::to_string(*r.fixed_q) : std::string()) << ','
      << format_number(100.0 * r.rejection_rate_nonrandomized) << ','
      << format_number(100.0 * r.rejection_rate_randomized) << ','
      << format_number(r.mean_q_used) << ',' << r.seed << '\n';
}

}  // namespace rdcont
