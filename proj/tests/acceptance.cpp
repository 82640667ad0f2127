// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "assistfair/decisions.hpp"
#include "assistfair/io.hpp"
#include "assistfair/metrics.hpp"
#include "assistfair/oracle.hpp"
#include "assistfair/verify.hpp"
#include "cli.hpp"
#include "support.hpp"

using namespace assistfair;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = ASSISTFAIR_CONFIG_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("assistfair_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out != nullptr) *out = o.str() + e.str();
  return code;
}

fs::path write_config(const std::string& name, const Json& doc) {
  const fs::path p = fs::temp_directory_path() / ("assistfair_acceptance_" + name + ".json");
  std::ofstream(p) << doc.dump(2);
  return p;
}

Json load(const std::string& name) { return Json::parse(slurp(kConfigs / name)); }

bool within_3se(double mean, double se, double target) {
  if (se == 0.0) return std::abs(mean - target) <= 1e-12;
  return std::abs(mean - target) < 3.0 * se;
}

// 1. Reference expectation table by Monte Carlo through the simulate command.
Verdict reference_table() {
  Verdict v;
  const fs::path out = scratch("reference_table");
  setenv("ASSISTFAIR_THREADS", "1", 1);
  const auto start = std::chrono::steady_clock::now();
  const int code = cli({"simulate", "--config", (kConfigs / "example.json").string(), "--reps", "200000", "--out",
                        out.string()});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  unsetenv("ASSISTFAIR_THREADS");
  v.require(code == 0, "simulate exit " + std::to_string(code));
  v.require(secs <= 60.0, "runtime " + num(secs) + " s");

  const std::map<std::string, std::pair<double, double>> oracle = {{"F_MINUS", {0.0, 1.125}},
                                                                   {"F_PLUS", {0.0, 1.25}},
                                                                   {"D0", {1.0, 1.25}},
                                                                   {"D_MINUS", {1.0, 1.33}},
                                                                   {"D_PLUS", {0.2, 1.17}}};
  std::istringstream csv(slurp(out / "metrics.csv"));
  std::string line;
  int matched = 0;
  double max_se = 0.0;
  while (std::getline(csv, line)) {
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 7 || f[1] != "ALL" || !oracle.count(f[0])) continue;
    const bool is_disp = f[2] == "avg_disparity";
    if (!is_disp && f[2] != "expected_risk") continue;
    const double mean = std::stod(f[3]);
    const double se = f[4] == "NA" ? NAN : std::stod(f[4]);
    const double target = is_disp ? oracle.at(f[0]).first : oracle.at(f[0]).second;
    ++matched;
    max_se = std::max(max_se, se);
    v.require(within_3se(mean, se, target), f[0] + " " + f[2] + " " + num(mean) + " vs " + num(target));
    v.require(se < 0.01, f[0] + " " + f[2] + " se " + num(se));
  }
  v.require(matched == 10, "found " + std::to_string(matched) + " of 10 values");
  if (v.pass) v.detail = "10/10 within 3 SE, max SE " + num(max_se) + ", " + num(secs) + " s single-threaded";
  return v;
}

// 2. Exact invariants of the balanced example in every replication.
Verdict exact_invariants() {
  Verdict v;
  const testing::Example ex;
  const Prior prior = ex.prior();
  const auto spec = ex.spec();
  const auto train = ex.training(2024);
  std::size_t bad_fm = 0, bad_dm = 0, bad_d0 = 0;
  double worst = 0.0;
  const std::size_t reps = 10000;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto draw = draw_replication(spec, train, train.seed, rep);
    const double fm = disparity(build_rule(RuleKind::kFMinus, prior, spec.noise_var, draw.blind, draw.aware), 0);
    const double dm = disparity(build_rule(RuleKind::kDMinus, prior, spec.noise_var, draw.blind, draw.aware), 0);
    const double d0 = disparity(build_rule(RuleKind::kD0, prior, spec.noise_var, draw.blind, draw.aware), 0);
    bad_fm += fm != 0.0;
    bad_dm += std::abs(dm - ex.delta) > 1e-12;
    bad_d0 += std::abs(d0 - ex.delta) > 1e-12;
    worst = std::max(worst, std::abs(dm - ex.delta));
  }
  v.require(bad_fm == 0, std::to_string(bad_fm) + " replications with Delta_f- != 0");
  v.require(bad_dm == 0, std::to_string(bad_dm) + " replications with |Delta_d- - delta| > 1e-12");
  v.require(bad_d0 == 0, std::to_string(bad_d0) + " replications with |Delta_d0 - delta| > 1e-12");
  if (v.pass) v.detail = "10000 replications, max |Delta_d- - delta| = " + num(worst);
  return v;
}

// 3. Dense grid posteriors against the conjugate closed forms.
Verdict conjugate_grid() {
  Verdict v;
  testing::Gen gen(20240919);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const double b0 = gen.real(-1, 1), b1 = gen.real(-1, 1), tau_sq = gen.real(0.25, 4), sigma_sq = gen.real(0.25, 4);
    const CellCounts c{gen.count(1, 50), gen.count(1, 50)};
    const double f = gen.real(-1.5, 1.5);
    const ConjugateNormalPrior conj{{{b0, b1}}, tau_sq};
    const GridPrior grid{{GridPrior::discretized_normal({b0, b1}, tau_sq, 2001, 8.0)}};
    for (int g = 0; g < 2; ++g) {
      const double ea = std::abs(grid_posterior_aware(grid, f, c[g], sigma_sq, 0, g) -
                                 decide_assisted_aware_conjugate(conj, f, c[g], sigma_sq, 0, g));
      const double eb = std::abs(grid_posterior_blind(grid, f, c, sigma_sq, 0, g) -
                                 decide_assisted_blind_conjugate(conj, f, c, sigma_sq, 0, g));
      worst = std::max({worst, ea, eb});
      v.require(ea < 1e-6, "tuple " + std::to_string(t) + " aware error " + num(ea));
      v.require(eb < 1e-6, "tuple " + std::to_string(t) + " blind error " + num(eb));
    }
  }
  if (v.pass) v.detail = "20 tuples, max |grid - conjugate| = " + num(worst);
  return v;
}

double verify_fraction(const std::string& claim, const fs::path& config, const fs::path& out, int* code) {
  *code = cli({"verify", claim, "--config", config.string(), "--out", out.string()});
  const fs::path result = out / ("verify_" + claim + ".json");
  if (!fs::exists(result)) return NAN;
  return Json::parse(slurp(result))["success_fraction"].get<double>();
}

// 4. Disparity reversal through the verify command.
Verdict disparity_reversal() {
  Verdict v;
  int code = 0, small_code = 0;
  const double f = verify_fraction("thm1", kConfigs / "thm1.json", scratch("thm1"), &code);
  Json small = load("thm1.json");
  small["counts"] = {{1, 1}};
  const double fs1 = verify_fraction("thm1", write_config("thm1_n1", small), scratch("thm1_n1"), &small_code);
  v.require(code == 0, "exit " + std::to_string(code));
  v.require(f >= 0.95, "fraction " + num(f));
  v.require(fs1 < f, "n=1 fraction " + num(fs1) + " not below " + num(f));
  v.detail = (v.pass ? "" : v.detail + "; ") + "fraction " + num(f) + " at n=200/group, " + num(fs1) + " at n=1/group";
  return v;
}

// 5. Reordering.
Verdict reordering() {
  Verdict v;
  int code = 0;
  const double f = verify_fraction("cor1", kConfigs / "thm1.json", scratch("cor1"), &code);
  v.require(code == 0, "exit " + std::to_string(code));
  v.require(f >= 0.95, "fraction " + num(f));
  if (v.pass) v.detail = "fraction " + num(f);
  return v;
}

// 6. Trade-off reversal.
Verdict tradeoff_reversal() {
  Verdict v;
  int code = 0;
  const double f = verify_fraction("thm2", kConfigs / "thm2.json", scratch("thm2"), &code);
  v.require(code == 0, "exit " + std::to_string(code));
  v.require(f >= 0.95, "fraction " + num(f));
  if (v.pass) v.detail = "joint fraction " + num(f);
  return v;
}

// 7. Machine regimes around xi.
Verdict machine_regimes() {
  Verdict v;
  const double xi = xi_threshold_general(testing::one_cell(0, 0), testing::cells(8, 8), 0);
  v.require(xi == 0.5, "xi = " + num(xi));
  std::string detail = "xi = " + num(xi);
  for (auto [dmu, regime, blind] : {std::tuple{0.8, Regime::kTradeOff, 1.2225}, std::tuple{0.2, Regime::kDominance, 1.0725}}) {
    const auto spec = testing::one_cell(-dmu / 2, dmu / 2);
    const auto train = testing::cells(8, 8, 31);
    const auto oracle = machine_risk_expectations(spec, train, 0);
    v.require(std::abs(oracle.aware - 1.125) < 1e-12 && std::abs(oracle.blind - blind) < 1e-12,
              "oracle risks at Delta_mu=" + num(dmu));
    v.require(classify_machine_regime(spec, train, 0).regime == regime, "oracle regime at Delta_mu=" + num(dmu));
    const auto r = mc_expected_metrics(spec, Prior{testing::conj(0, 0, 1)}, train, {RuleKind::kFMinus, RuleKind::kFPlus},
                                       100000);
    const McStat& a = r.rule(RuleKind::kFPlus).risk_by_x[0];
    const McStat& b = r.rule(RuleKind::kFMinus).risk_by_x[0];
    const McStat& gap = r.gap(RuleKind::kFPlus, RuleKind::kFMinus)->by_x[0];
    v.require(within_3se(a.mean, a.se, oracle.aware), "MC aware risk " + num(a.mean) + " at Delta_mu=" + num(dmu));
    v.require(within_3se(b.mean, b.se, oracle.blind), "MC blind risk " + num(b.mean) + " at Delta_mu=" + num(dmu));
    v.require((gap.mean < 0.0) == (regime == Regime::kTradeOff), "MC gap sign at Delta_mu=" + num(dmu));
    detail += ", " + std::string(regime_name(regime)) + " at " + num(dmu) + " (MC " + num(a.mean) + ", " + num(b.mean) + ")";
  }
  if (v.pass) v.detail = detail;
  return v;
}

// 8. Assistance threshold on delta.
Verdict delta_threshold() {
  Verdict v;
  const double thr = delta_threshold_example(1.0, 1.0, 12, 0.0);
  v.require(thr == 0.5, "threshold = " + num(thr));
  std::string detail = "threshold " + num(thr);
  for (double delta : {0.75, 0.25}) {
    const testing::Example ex{1.0, 1.0, 12, delta, 0.0, 0.0, 0.0};
    const auto table = example_closed_forms(1.0, 1.0, ex.params());
    const auto r = mc_expected_metrics(ex.spec(), ex.prior(), ex.training(8), {RuleKind::kDMinus, RuleKind::kDPlus}, 100000);
    const McStat& dp = r.rule(RuleKind::kDPlus).risk_by_x[0];
    const McStat& dm = r.rule(RuleKind::kDMinus).risk_by_x[0];
    const McStat& gap = r.gap(RuleKind::kDPlus, RuleKind::kDMinus)->by_x[0];
    v.require(within_3se(dp.mean, dp.se, table.row(RuleKind::kDPlus).expected_risk), "MC d+ risk at delta=" + num(delta));
    v.require(within_3se(dm.mean, dm.se, table.row(RuleKind::kDMinus).expected_risk), "MC d- risk at delta=" + num(delta));
    const bool plus_better = delta > thr;
    v.require((gap.mean < 0.0) == plus_better, "MC ordering at delta=" + num(delta));
    v.require(std::abs(gap.mean) > 3 * gap.se, "MC gap not resolved at delta=" + num(delta));
    detail += ", delta=" + num(delta) + ": r_d+ - r_d- = " + num(gap.mean) + " (se " + num(gap.se) + ")";
  }
  const auto eq = example_closed_forms(1.0, 1.0, {0.0, 0.0, thr, 0.0, 12});
  const double diff = std::abs(eq.row(RuleKind::kDPlus).expected_risk - eq.row(RuleKind::kDMinus).expected_risk);
  v.require(diff < 1e-10, "oracle risks differ by " + num(diff) + " at the threshold");
  if (v.pass) v.detail = detail + ", oracle gap at threshold " + num(diff);
  return v;
}

// 9. Posterior consistency on a grid prior.
Verdict consistency() {
  Verdict v;
  const auto [s1, w1] = GridPrior::normal_marginal(0.0, 1.0, 2001, 8.0);
  const GridPrior grid{{GridPrior::product({0.0}, {1.0}, s1, w1)}};
  ConsistencyOptions o;
  o.reps = 500;
  o.seed = 99;
  o.threads = 1;
  const auto r = verify_consistency(grid, testing::one_cell(0.0, 0.3), {10, 100, 1000}, o);
  std::string medians;
  for (const auto& row : r.rows) medians += (medians.empty() ? "" : ", ") + num(row.median_abs_error);
  v.require(r.truth_in_support, "truth outside support");
  v.require(r.weakly_decreasing, "medians not weakly decreasing: " + medians);
  v.require(r.final_below_bound && r.rows.back().median_abs_error < 0.05, "final median " + num(r.rows.back().median_abs_error));
  if (v.pass) v.detail = "medians " + medians + " at n = 10, 100, 1000";
  return v;
}

// 10. Byte-identical outputs across repeated runs and worker counts.
Verdict determinism() {
  Verdict v;
  struct Cmd {
    std::vector<std::string> args;
    std::vector<std::string> files;
  };
  const std::vector<Cmd> cmds = {
      {{"simulate", "--config", (kConfigs / "example.json").string(), "--reps", "5000"}, {"metrics.csv", "metrics.json"}},
      {{"closed-form"}, {"closed_form.txt", "closed_form.json"}},
      {{"verify", "thm2", "--config", (kConfigs / "thm2.json").string()}, {"verify_thm2.json"}},
      {{"verify", "remark3", "--config", (kConfigs / "regimes.json").string(), "--reps", "3000"}, {"verify_remark3.json"}},
      {{"sweep", "--config", (kConfigs / "sweep_delta_mu.json").string(), "--reps", "1000"},
       {"sweep.csv", "fig_disparity.csv", "fig_risk.csv", "fig_risk_gap.csv", "fig_risk_gap.svg"}},
  };
  std::size_t compared = 0;
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    std::vector<std::string> baseline;
    int run = 0;
    for (const char* threads : {"1", "1", "4", "13"}) {
      setenv("ASSISTFAIR_THREADS", threads, 1);
      const fs::path out = scratch("det_" + std::to_string(c) + "_" + std::to_string(run++));
      auto args = cmds[c].args;
      args.push_back("--out");
      args.push_back(out.string());
      const int code = cli(args);
      v.require(code == 0, cmds[c].args[0] + " exit " + std::to_string(code));
      std::vector<std::string> contents;
      for (const auto& f : cmds[c].files) contents.push_back(slurp(out / f));
      if (baseline.empty()) {
        baseline = contents;
      } else {
        for (std::size_t i = 0; i < contents.size(); ++i) {
          ++compared;
          v.require(!contents[i].empty() && contents[i] == baseline[i],
                    cmds[c].args[0] + " " + cmds[c].files[i] + " differs with " + threads + " threads");
        }
      }
    }
  }
  unsetenv("ASSISTFAIR_THREADS");
  if (v.pass) v.detail = std::to_string(compared) + " file comparisons identical over 1, 1, 4, 13 workers";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"reference expectation table by simulation", reference_table},
      {"exact blind-update and blind-prediction invariants", exact_invariants},
      {"conjugate and grid posterior agreement", conjugate_grid},
      {"disparity reversal (verify thm1)", disparity_reversal},
      {"disparity reordering (verify cor1)", reordering},
      {"trade-off reversal (verify thm2)", tradeoff_reversal},
      {"machine trade-off and dominance regimes", machine_regimes},
      {"assistance threshold on delta", delta_threshold},
      {"posterior consistency on a grid prior", consistency},
      {"determinism across runs and worker counts", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("%s %2zu %s: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
