#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "assistfair/experiment.hpp"
#include "assistfair/oracle.hpp"
#include "assistfair/parallel.hpp"
#include "assistfair/svg.hpp"
#include "assistfair/verify.hpp"

namespace assistfair {

namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out;
  std::optional<double> level;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool need_config) {
  auto* c = cmd->add_option("--config", flags.config, "experiment config (JSON)");
  if (need_config) c->required();
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--reps", flags.reps, "Monte Carlo replications");
  cmd->add_option("--out", flags.out, "output directory");
  cmd->add_option("--level", flags.level, "required success fraction");
}

ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  ExperimentConfig config = load_experiment(flags.config);
  if (flags.seed) config.training.seed = *flags.seed;
  if (flags.reps) config.reps = *flags.reps;
  if (flags.out) config.out = *flags.out;
  if (flags.level) config.level = *flags.level;
  if (config.reps == 0) throw ConfigError("reps must be at least 1");
  if (!(config.level > 0.0 && config.level <= 1.0)) throw ConfigError("level must lie in (0, 1]");
  return config;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + dir + "'");
  return dir;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  os << content;
  if (!os) throw ConfigError("cannot write '" + path.string() + "'");
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

std::string fmt(const char* pattern, double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// The balanced single-covariate conjugate example, if the config is one.
std::optional<ClosedFormTable> example_oracle(const ExperimentConfig& config) {
  const auto* conj = std::get_if<ConjugateNormalPrior>(&config.prior);
  if (conj == nullptr || config.spec.covariates.size() != 1 || config.spec.group_probs[0] != 0.5) {
    return std::nullopt;
  }
  try {
    const auto params = derive_example_params(config.spec, config.prior, config.training, config.covariate_index());
    return example_closed_forms(config.spec.noise_var, conj->tau_sq, params);
  } catch (const Error&) {
    return std::nullopt;
  }
}

std::vector<CsvRow> oracle_rows(const ExperimentConfig& config, const ClosedFormTable& table) {
  std::vector<CsvRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (RuleKind kind : config.rules) {
    const auto& r = table.row(kind);
    const std::string name(rule_name(kind));
    rows.push_back({name, config.spec.covariates[0], "oracle_disparity", r.expected_disparity, nan});
    rows.push_back({name, config.spec.covariates[0], "oracle_risk", r.expected_risk, nan});
  }
  return rows;
}

void print_summary(std::ostream& out, const MetricsReport& report, const ClosedFormTable* oracle) {
  out << "rule      E[Delta]     se          E[r]         se";
  if (oracle != nullptr) out << "          oracle E[Delta]  oracle E[r]";
  out << "\n";
  for (const auto& m : report.rules) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-9s %-12s %-11s %-12s %-11s", std::string(rule_name(m.kind)).c_str(),
                  fmt("%.6f", m.avg_disparity.mean).c_str(), fmt("%.2e", m.avg_disparity.se).c_str(),
                  fmt("%.6f", m.expected_risk.mean).c_str(), fmt("%.2e", m.expected_risk.se).c_str());
    out << buf;
    if (oracle != nullptr) {
      const auto& r = oracle->row(m.kind);
      std::snprintf(buf, sizeof buf, " %-16s %s", fmt("%.6f", r.expected_disparity).c_str(),
                    fmt("%.6f", r.expected_risk).c_str());
      out << buf;
    }
    out << "\n";
  }
  out << "reps " << report.reps << ", seed " << report.seed << "\n";
}

int simulate(const ExperimentConfig& config, std::ostream& out) {
  const fs::path dir = prepare_out(config.out);
  McOptions mc{default_thread_count()};
  const MetricsReport report =
      mc_expected_metrics(config.spec, config.prior, config.training, config.rules, config.reps, mc);
  const auto oracle = example_oracle(config);

  auto rows = metrics_rows(report);
  Json doc = metrics_to_json(report);
  if (oracle) {
    for (auto& r : oracle_rows(config, *oracle)) rows.push_back(std::move(r));
    doc["oracle"] = closed_form_to_json(*oracle);
  }
  std::ostringstream csv;
  write_metrics_csv(csv, rows, report.reps, report.seed);
  write_file(dir / "metrics.csv", csv.str());
  write_file(dir / "metrics.json", dump(doc));
  print_summary(out, report, oracle ? &*oracle : nullptr);
  return kExitOk;
}

struct ClosedFormFlags {
  double sigma_sq = 1.0;
  double tau_sq = 1.0;
  std::size_t n = 8;
  double delta = 1.0;
  double delta_mu = 0.0;
  double beta_bar = 0.0;
  double mu_bar = 0.0;
};

int closed_form(const CommonFlags& common, const ClosedFormFlags& flags, std::ostream& out) {
  double sigma_sq = flags.sigma_sq;
  double tau_sq = flags.tau_sq;
  DerivedExampleParams params{flags.delta_mu, flags.mu_bar, flags.delta, flags.beta_bar, flags.n};
  std::string out_dir = common.out.value_or("out");
  if (!common.config.empty()) {
    const ExperimentConfig config = load_with_overrides(common);
    const auto* conj = std::get_if<ConjugateNormalPrior>(&config.prior);
    if (conj == nullptr) throw ConfigError("closed-form needs a conjugate_normal prior");
    params = derive_example_params(config.spec, config.prior, config.training, config.covariate_index());
    sigma_sq = config.spec.noise_var;
    tau_sq = conj->tau_sq;
    out_dir = config.out;
  }
  const ClosedFormTable table = example_closed_forms(sigma_sq, tau_sq, params);
  const RegimeResult regime = example_regime(sigma_sq, tau_sq, params.n, params.delta_mu);
  const fs::path dir = prepare_out(out_dir);
  const std::string text = format_closed_form_table(table);
  Json doc = closed_form_to_json(table);
  doc["regime"] = regime_to_json(regime);
  write_file(dir / "closed_form.txt", text);
  write_file(dir / "closed_form.json", dump(doc));
  out << text;
  return kExitOk;
}

int verify(const std::string& claim_text, const CommonFlags& flags, std::ostream& out) {
  const ClaimId claim = parse_claim(claim_text);
  const ExperimentConfig config = load_with_overrides(flags);
  VerifyOptions opts;
  opts.x = config.covariate_index();
  opts.reps = config.reps;
  opts.threads = default_thread_count();
  opts.zeta = config.zeta;
  const VerificationOutcome outcome = verify_claim(claim, config.spec, config.prior, config.training, opts);
  const fs::path dir = prepare_out(config.out);
  std::string name(claim_name(claim));
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  write_file(dir / ("verify_" + name + ".json"), dump(outcome_to_json(outcome, config.level)));
  out << outcome.summary_line(config.level) << "\n";
  for (const auto& i : outcome.inequalities) out << "  " << i.name << ": " << format_number(i.fraction) << "\n";
  for (const auto& n : outcome.notes) out << "  note: " << n << "\n";
  return outcome.success_fraction >= config.level ? kExitOk : kExitFailure;
}

const char* axis_symbol(const std::string& param) {
  if (param == "delta_mu") return "Δμ";
  if (param == "delta") return "δ";
  if (param == "noise_var") return "σ²";
  if (param == "tau_sq") return "τ²";
  if (param == "mu_bar") return "μ̄";
  if (param == "beta_bar") return "β̄";
  return nullptr;
}

void write_chart(const fs::path& dir, const std::string& stem, const LineChart& chart) {
  write_file(dir / (stem + ".svg"), render_svg(chart));
  write_file(dir / (stem + ".csv"), chart_points_csv(chart));
}

void write_figures(const fs::path& dir, const ExperimentConfig& config, const SweepResult& result) {
  const std::string& param = result.axes[0];
  const char* sym = axis_symbol(param);
  const std::string x_label = sym != nullptr ? sym : param;
  const std::size_t x = config.covariate_index();
  const std::string at = " at x = " + config.spec.covariates[x];

  std::vector<double> xs;
  for (const auto& p : result.points) xs.push_back(p.values[0]);

  LineChart disp{"Expected disparity" + at, x_label, "E[Δ]", {}, std::nullopt, ""};
  LineChart risk{"Expected risk" + at, x_label, "E[r]", {}, std::nullopt, ""};
  for (RuleKind kind : config.rules) {
    Series d{std::string(rule_name(kind)), xs, {}};
    Series r{std::string(rule_name(kind)), xs, {}};
    for (const auto& p : result.points) {
      const auto& m = p.report.rule(kind);
      d.y.push_back(m.disparity_by_x[x].mean);
      r.y.push_back(m.risk_by_x[x].mean);
    }
    disp.series.push_back(std::move(d));
    risk.series.push_back(std::move(r));
  }

  LineChart gap{"Risk gap" + at, x_label, "Δr", {}, std::nullopt, ""};
  const auto& first = result.points.front().report;
  for (const auto& g : first.gaps) {
    Series s{std::string(rule_name(g.minuend)) + " - " + std::string(rule_name(g.subtrahend)), xs, {}};
    for (const auto& p : result.points) s.y.push_back(p.report.gap(g.minuend, g.subtrahend)->by_x[x].mean);
    gap.series.push_back(std::move(s));
  }
  if (param == "delta_mu" && result.points.front().xi) {
    const double xi = *result.points.front().xi;
    const bool constant = std::all_of(result.points.begin(), result.points.end(),
                                      [&](const SweepPoint& p) { return p.xi && *p.xi == xi; });
    if (constant) {
      for (LineChart* c : {&disp, &risk, &gap}) {
        c->marker_x = xi;
        c->marker_label = "ξ = " + format_number(xi);
      }
    }
  }
  write_chart(dir, "fig_disparity", disp);
  write_chart(dir, "fig_risk", risk);
  if (!gap.series.empty()) write_chart(dir, "fig_risk_gap", gap);
}

int sweep(const ExperimentConfig& config, std::ostream& out) {
  if (config.sweep.empty()) return simulate(config, out);
  const fs::path dir = prepare_out(config.out);
  const SweepResult result = run_sweep(config, McOptions{default_thread_count()});

  std::ostringstream csv;
  for (const auto& a : result.axes) csv << a << ",";
  csv << kMetricsCsvHeader << "\n";
  for (const auto& p : result.points) {
    std::string prefix;
    for (double v : p.values) prefix += format_number(v) + ",";
    for (const auto& r : metrics_rows(p.report)) {
      csv << prefix << r.rule << "," << r.x << "," << r.quantity << "," << format_number(r.value) << ","
          << format_number(r.se) << "," << p.report.reps << "," << p.report.seed << "\n";
    }
    if (p.xi) {
      csv << prefix << "ORACLE," << config.spec.covariates[config.covariate_index()] << ",xi,"
          << format_number(*p.xi) << ",NA," << p.report.reps << "," << p.report.seed << "\n";
    }
  }
  write_file(dir / "sweep.csv", csv.str());
  if (result.axes.size() == 1) write_figures(dir, config, result);
  out << "sweep over";
  for (const auto& a : result.axes) out << " " << a;
  out << ": " << result.points.size() << " points written to " << (dir / "sweep.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fairness of machine-assisted human decisions: simulation and verification"};
  app.name("assistfair");
  app.require_subcommand(1);

  CommonFlags sim_flags, cf_flags, ver_flags, sweep_flags;
  ClosedFormFlags cf;
  std::string claim;

  auto* sim = app.add_subcommand("simulate", "Monte Carlo metrics for every requested rule");
  add_common(sim, sim_flags, true);

  auto* cfc = app.add_subcommand("closed-form", "exact expectations in the balanced example");
  add_common(cfc, cf_flags, false);
  cfc->add_option("--sigma-sq", cf.sigma_sq, "noise variance");
  cfc->add_option("--tau-sq", cf.tau_sq, "prior variance");
  cfc->add_option("--n", cf.n, "total sample size, n/2 per group");
  cfc->add_option("--delta", cf.delta, "prior mean gap");
  cfc->add_option("--delta-mu", cf.delta_mu, "true mean gap");
  cfc->add_option("--beta-bar", cf.beta_bar, "prior mean centre");
  cfc->add_option("--mu-bar", cf.mu_bar, "true mean centre");

  auto* ver = app.add_subcommand("verify", "check a claim by simulation");
  ver->add_option("claim", claim, "REMARK1, REMARK2, REMARK3, THM1, COR1 or THM2")->required();
  add_common(ver, ver_flags, true);

  auto* swp = app.add_subcommand("sweep", "metrics over a grid of parameter values");
  add_common(swp, sweep_flags, true);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sim) return simulate(load_with_overrides(sim_flags), out);
    if (*cfc) return closed_form(cf_flags, cf, out);
    if (*ver) return verify(claim, ver_flags, out);
    if (*swp) return sweep(load_with_overrides(sweep_flags), out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace assistfair
