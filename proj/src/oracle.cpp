#include "assistfair/oracle.hpp"

#include <cmath>
#include <cstdio>

#include "assistfair/errors.hpp"

namespace assistfair {

const ClosedFormRow& ClosedFormTable::row(RuleKind kind) const {
  for (const auto& r : rows) {
    if (r.rule == kind) return r;
  }
  throw ValidationError("rule missing from closed-form table");
}

ClosedFormTable example_closed_forms(double sigma_sq, double tau_sq, const DerivedExampleParams& p) {
  if (!(sigma_sq > 0.0) || !(tau_sq > 0.0)) throw ValidationError("sigma_sq and tau_sq must be positive");
  if (p.n == 0 || p.n % 2 != 0) throw ValidationError("balanced example requires even n");

  const double n = static_cast<double>(p.n);
  const double s = sigma_sq + 0.5 * n * tau_sq;
  const double s2 = s * s;
  const double sigma4 = sigma_sq * sigma_sq;
  const double tau4 = tau_sq * tau_sq;
  const double level_bias = p.mu_bar - p.beta_bar;
  const double gap_bias = p.delta_mu - p.delta;
  const double level_sq = level_bias * level_bias;
  const double gap_sq_quarter = 0.25 * gap_bias * gap_bias;

  ClosedFormTable t;
  t.sigma_sq = sigma_sq;
  t.tau_sq = tau_sq;
  t.params = p;
  t.rows[0] = {RuleKind::kFMinus, 0.0, 0.25 * p.delta_mu * p.delta_mu + sigma_sq * (1.0 + 1.0 / n)};
  t.rows[1] = {RuleKind::kFPlus, p.delta_mu, sigma_sq * (1.0 + 2.0 / n)};
  t.rows[2] = {RuleKind::kD0, p.delta, level_sq + gap_sq_quarter + sigma_sq};
  t.rows[3] = {RuleKind::kDMinus, p.delta,
               sigma4 * level_sq / s2 + gap_sq_quarter + sigma_sq * (1.0 + n * tau4 / (4.0 * s2))};
  t.rows[4] = {RuleKind::kDPlus, (sigma_sq * p.delta + 0.5 * n * tau_sq * p.delta_mu) / s,
               sigma4 * (level_sq + gap_sq_quarter) / s2 + sigma_sq * (1.0 + n * tau4 / (2.0 * s2))};
  return t;
}

std::string format_closed_form_table(const ClosedFormTable& t) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line,
                "sigma^2=%g tau^2=%g n=%zu delta=%g Delta_mu=%g beta_bar=%g mu_bar=%g\n", t.sigma_sq,
                t.tau_sq, t.params.n, t.params.delta, t.params.delta_mu, t.params.beta_bar, t.params.mu_bar);
  out += line;
  std::snprintf(line, sizeof line, "%-8s %14s %14s\n", "rule", "E[Delta]", "E[r]");
  out += line;
  for (const auto& r : t.rows) {
    std::snprintf(line, sizeof line, "%-8s %14.8f %14.8f\n", std::string(rule_name(r.rule)).c_str(),
                  r.expected_disparity, r.expected_risk);
    out += line;
  }
  return out;
}

namespace {

struct CellTerms {
  double sigma_sq;
  double n;
  PerGroup<double> n_g;
  PerGroup<double> p_g;
};

CellTerms cell_terms(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x) {
  const CellCounts& c = config.counts.at(x);
  if (c[0] == 0 || c[1] == 0) throw EmptyCellError("machine risk expectations need n(x,0), n(x,1) >= 1");
  return CellTerms{spec.noise_var,
                   static_cast<double>(c[0] + c[1]),
                   {static_cast<double>(c[0]), static_cast<double>(c[1])},
                   {spec.group_prob(x, 0), spec.group_prob(x, 1)}};
}

// Variance excess of the aware rule over the blind rule.
double variance_excess(const CellTerms& t) {
  return t.p_g[0] * t.sigma_sq / t.n_g[0] + t.p_g[1] * t.sigma_sq / t.n_g[1] - t.sigma_sq / t.n;
}

// Coefficient of Delta_mu^2 in the blind rule's squared bias.
double bias_coefficient(const CellTerms& t) {
  const double other0 = t.n_g[1] / t.n;
  const double other1 = t.n_g[0] / t.n;
  return t.p_g[0] * other0 * other0 + t.p_g[1] * other1 * other1;
}

}  // namespace

MachineRisks machine_risk_expectations(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x) {
  const CellTerms t = cell_terms(spec, config, x);
  const double delta_mu = spec.mean(x, 1) - spec.mean(x, 0);
  MachineRisks r;
  r.aware = t.p_g[0] * t.sigma_sq / t.n_g[0] + t.p_g[1] * t.sigma_sq / t.n_g[1] + t.sigma_sq;
  r.blind = bias_coefficient(t) * delta_mu * delta_mu + t.sigma_sq / t.n + t.sigma_sq;
  return r;
}

double xi_threshold_general(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x) {
  const CellTerms t = cell_terms(spec, config, x);
  return std::sqrt(variance_excess(t) / bias_coefficient(t));
}

std::string_view regime_name(Regime regime) {
  switch (regime) {
    case Regime::kTradeOff: return "TRADE_OFF";
    case Regime::kDominance: return "DOMINANCE";
    case Regime::kBoundary: return "BOUNDARY";
  }
  return "?";
}

RegimeResult classify_machine_regime(const ProblemSpec& spec, const TrainingConfig& config, std::size_t x) {
  RegimeResult r;
  r.xi = xi_threshold_general(spec, config, x);
  r.delta_mu = spec.mean(x, 1) - spec.mean(x, 0);
  r.sigma_sq = spec.noise_var;
  r.counts = config.counts.at(x);
  const double magnitude = std::abs(r.delta_mu);
  r.regime = magnitude > r.xi ? Regime::kTradeOff : magnitude < r.xi ? Regime::kDominance : Regime::kBoundary;
  return r;
}

double delta_threshold_example(double sigma_sq, double tau_sq, double n, double delta_mu) {
  if (!(sigma_sq > 0.0) || !(tau_sq > 0.0) || !(n > 0.0)) {
    throw ValidationError("sigma_sq, tau_sq and n must be positive");
  }
  return delta_mu + 2.0 * std::sqrt(tau_sq * sigma_sq) / std::sqrt(n * tau_sq + 4.0 * sigma_sq);
}

RegimeResult example_regime(double sigma_sq, double tau_sq, std::size_t n, double delta_mu) {
  if (n == 0 || n % 2 != 0) throw ValidationError("balanced example requires even n");
  ProblemSpec spec{{"x"}, {0.5}, {1.0}, {{-0.5 * delta_mu, 0.5 * delta_mu}}, sigma_sq};
  TrainingConfig config{{{n / 2, n / 2}}, 0};
  RegimeResult r = classify_machine_regime(spec, config, 0);
  r.delta_threshold = delta_threshold_example(sigma_sq, tau_sq, static_cast<double>(n), delta_mu);
  return r;
}

}  // namespace assistfair
