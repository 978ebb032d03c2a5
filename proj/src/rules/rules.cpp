#include "pemi/rules.hpp"

#include <algorithm>
#include <cmath>

#include "pemi/errors.hpp"
#include "pemi/random.hpp"

namespace pemi {
namespace {

// Time index of the last position of a view with `positions` entries.
long last_time(std::size_t positions, std::size_t n_offline) {
  return static_cast<long>(positions) - static_cast<long>(n_offline);
}

}  // namespace

// ---- decision-driven ------------------------------------------------------

DecisionDrivenRule::DecisionDrivenRule(PredictorPtr mu, double tau0, double tau1)
    : mu_(std::move(mu)), tau0_(tau0), tau1_(tau1) {
  if (!(tau0 > 0)) throw ConfigError("decision-driven rule needs tau0 > 0");
}

bool DecisionDrivenRule::select(const SequenceView& view) const {
  std::size_t selected = 0;
  bool s = false;
  for (std::size_t p = view.offline_size(); p < view.size(); ++p) {
    s = decide((*mu_)(view.x(p)), selected);
    selected += s;
  }
  return s;
}

Trajectory DecisionDrivenRule::trajectory(const SequenceView& view) const {
  Trajectory out;
  out.reserve(view.t());
  std::size_t selected = 0;
  for (std::size_t p = view.offline_size(); p < view.size(); ++p) {
    const bool s = decide((*mu_)(view.x(p)), selected);
    selected += s;
    out.push_back(s);
  }
  return out;
}

// ---- weighted quantile / average of predictions ---------------------------

WeightedPredictionRule::WeightedPredictionRule(PredictorPtr mu, Mode mode, double q_sel, PositionWeights weights)
    : mu_(std::move(mu)), mode_(mode), q_sel_(q_sel), weights_(std::move(weights)) {
  if (mode == Mode::quantile && !(q_sel > 0 && q_sel < 1)) throw ConfigError("q_sel must lie in (0, 1)");
}

bool WeightedPredictionRule::select(const SequenceView& view) const {
  const std::size_t n = view.last();
  if (n == 0) return true;
  const double mu_t = (*mu_)(view.x(n));
  std::vector<double> w(n);
  weights_.fill(w, 1 - static_cast<long>(view.offline_size()), static_cast<long>(view.t()));
  double total = 0, acc = 0;
  for (std::size_t p = 0; p < n; ++p) {
    const double m = (*mu_)(view.x(p));
    total += w[p];
    if (mode_ == Mode::quantile) {
      if (m < mu_t) acc += w[p];
    } else {
      acc += w[p] * m;
    }
  }
  if (!(total > 0)) throw DomainError("total weight must be positive");
  // mu_t > wQ(1 - q) exactly when the weight strictly below mu_t reaches (1 - q) W.
  if (mode_ == Mode::quantile) return acc >= (1 - q_sel_) * total;
  return mu_t > acc / total;
}

// ---- model uncertainty ----------------------------------------------------

UncertaintyBudgetRule::UncertaintyBudgetRule(std::vector<PredictorPtr> models, double gamma)
    : models_(std::move(models)), gamma_(gamma) {
  if (models_.size() < 2) throw ConfigError("uncertainty rule needs at least two models");
  if (!(gamma >= 0 && gamma <= 1)) throw ConfigError("throughput gamma must lie in [0, 1]");
}

double UncertaintyBudgetRule::disagreement(std::span<const double> x) const {
  std::vector<double> f;
  f.reserve(models_.size());
  double mean = 0;
  for (const auto& m : models_) {
    f.push_back((*m)(x));
    mean += f.back();
  }
  mean /= static_cast<double>(f.size());
  double var = 0;
  for (double v : f) var += (v - mean) * (v - mean);
  return var / static_cast<double>(f.size());
}

double UncertaintyBudgetRule::budget_threshold(std::span<const double> past) const {
  const auto k = static_cast<std::size_t>(std::floor(gamma_ * static_cast<double>(past.size())));
  std::vector<double> d(past.begin(), past.end());
  std::sort(d.begin(), d.end(), std::greater<>());
  // Admitting everything >= d[i] costs (end of d[i]'s tie group) slots.
  double tau = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < d.size();) {
    std::size_t j = i;
    while (j < d.size() && d[j] == d[i]) ++j;
    if (j > k) break;
    tau = d[i];
    i = j;
  }
  return tau;
}

bool UncertaintyBudgetRule::select(const SequenceView& view) const {
  std::vector<double> past;
  past.reserve(view.last());
  for (std::size_t p = 0; p < view.last(); ++p) past.push_back(disagreement(view.x(p)));
  return disagreement(view.x(view.last())) >= budget_threshold(past);
}

// ---- cutoff rules ---------------------------------------------------------

void CutoffRule::extract(const SequenceView& view, std::vector<double>& f, std::vector<std::uint8_t>& null) const {
  f.resize(view.size());
  null.assign(view.size(), 0);
  for (std::size_t p = 0; p < view.size(); ++p) {
    const auto& c = view.cutoff(p);
    if (!c) throw ConfigError("conformal selection requires a cutoff for every point");
    f[p] = conformal_score(view.x(p), *c);
    if (p < view.last()) null[p] = view.y(p) <= *c;
  }
}

bool CutoffRule::select(const SequenceView& view) const {
  std::vector<double> f;
  std::vector<std::uint8_t> null;
  extract(view, f, null);
  return select_from(f, null, view.offline_size());
}

Trajectory CutoffRule::trajectory(const SequenceView& view) const {
  std::vector<double> f;
  std::vector<std::uint8_t> null;
  extract(view, f, null);
  return trajectory_from(f, null, view.offline_size());
}

Trajectory CutoffRule::trajectory_from(std::span<const double> f, std::span<const std::uint8_t> null,
                                       std::size_t n_offline) const {
  Trajectory out;
  for (std::size_t p = n_offline; p < f.size(); ++p)
    out.push_back(select_from(f.first(p + 1), null.first(p + 1), n_offline));
  return out;
}

ConformalPValueRule::ConformalPValueRule(PredictorPtr mu, EnginePtr engine, PositionWeights weights)
    : CutoffRule(std::move(mu)), engine_(std::move(engine)), weights_(std::move(weights)) {
  if (!engine_) throw ConfigError("conformal p-value rule needs a threshold engine");
}

double weighted_conformal_pvalue(std::span<const double> f, std::span<const std::uint8_t> null,
                                 std::span<const double> w) {
  const std::size_t t = f.size();
  if (t == 0 || null.size() != t || w.size() != t) throw DomainError("p-value inputs must have equal, positive length");
  double num = w[t - 1], den = w[t - 1];
  for (std::size_t i = 0; i + 1 < t; ++i) {
    if (!(w[i] >= 0)) throw DomainError("weights must be non-negative");
    den += w[i];
    if (null[i] && f[i] >= f[t - 1]) num += w[i];
  }
  if (!(den > 0)) throw DomainError("total weight must be positive");
  return num / den;
}

double ConformalPValueRule::pvalue_at(std::span<const double> f, std::span<const std::uint8_t> null,
                                      std::size_t n_offline, std::size_t j) const {
  std::vector<double> w(j);
  weights_.fill(w, 1, static_cast<long>(j));
  return weighted_conformal_pvalue(f.subspan(n_offline, j), null.subspan(n_offline, j), w);
}

std::vector<double> ConformalPValueRule::pvalues(std::span<const double> f, std::span<const std::uint8_t> null,
                                                 std::size_t n_offline) const {
  const std::size_t t = f.size() - n_offline;
  std::vector<double> p(t);
  for (std::size_t j = 1; j <= t; ++j) p[j - 1] = pvalue_at(f, null, n_offline, j);
  return p;
}

bool ConformalPValueRule::select_from(std::span<const double> f, std::span<const std::uint8_t> null,
                                      std::size_t n_offline) const {
  const std::size_t t = f.size() - n_offline;
  if (!engine_->uses_history()) return pvalue_at(f, null, n_offline, t) <= engine_->threshold({}, {});
  const auto p = pvalues(f, null, n_offline);
  std::vector<double> alpha(t);
  engine_->replay(p, alpha);
  return p[t - 1] <= alpha[t - 1];
}

Trajectory ConformalPValueRule::trajectory_from(std::span<const double> f, std::span<const std::uint8_t> null,
                                                std::size_t n_offline) const {
  const auto p = pvalues(f, null, n_offline);
  std::vector<double> alpha(p.size());
  engine_->replay(p, alpha);
  Trajectory out(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) out[j] = p[j] <= alpha[j];
  return out;
}

ELondRule::ELondRule(PredictorPtr mu, double alpha, GammaSequence gamma, std::optional<std::uint64_t> seed)
    : CutoffRule(std::move(mu)), alpha_(alpha), gamma_(std::move(gamma)), seed_(seed) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("e-LOND level must lie in (0, 1)");
}

std::vector<double> ELondRule::evalues(std::span<const double> f, std::span<const std::uint8_t> null,
                                       std::size_t n_offline) const {
  if (n_offline == 0) throw ConfigError("e-LOND selection needs an offline block");
  const std::size_t t = f.size() - n_offline;
  const double denom = static_cast<double>(n_offline + 1);
  std::vector<double> e(t);
  std::size_t r_minus = 0, r_plus = 0;
  for (std::size_t j = 1; j <= t; ++j) {
    const double fj = f[n_offline + j - 1];
    std::size_t count = 0;
    for (std::size_t i = 0; i < n_offline; ++i) count += (null[i] && f[i] >= fj);
    const double p_minus = static_cast<double>(count) / denom;
    const double p_plus = static_cast<double>(count + 1) / denom;
    const double a_minus = lond_threshold(alpha_, gamma_(j), r_minus);
    const double a_plus = lond_threshold(alpha_, gamma_(j), r_plus);
    e[j - 1] = (p_plus <= a_plus ? 1.0 : 0.0) / a_minus;
    r_minus += p_minus <= a_minus;
    r_plus += p_plus <= a_plus;
  }
  return e;
}

Trajectory ELondRule::trajectory_from(std::span<const double> f, std::span<const std::uint8_t> null,
                                      std::size_t n_offline) const {
  const auto e = evalues(f, null, n_offline);
  Trajectory out(e.size());
  std::size_t rejections = 0;
  for (std::size_t j = 1; j <= e.size(); ++j) {
    const double level = lond_threshold(alpha_, gamma_(j), rejections);
    double u = 1.0;
    if (seed_) {
      SplitMix64 gen(derive_seed(*seed_, {j}));
      u = uniform01(gen);
    }
    out[j - 1] = e[j - 1] >= u / level;
    rejections += out[j - 1];
  }
  return out;
}

bool ELondRule::select_from(std::span<const double> f, std::span<const std::uint8_t> null,
                            std::size_t n_offline) const {
  return trajectory_from(f, null, n_offline).back() != 0;
}

// ---- earlier outcomes -----------------------------------------------------

EarlierOutcomeRule::EarlierOutcomeRule(PredictorPtr mu, double beta, PositionWeights weights)
    : mu_(std::move(mu)), beta_(beta), weights_(std::move(weights)) {
  if (!(beta > 0 && beta < 1)) throw ConfigError("earlier-outcome beta must lie in (0, 1)");
}

bool EarlierOutcomeRule::decide(std::span<const std::uint8_t> below, std::size_t n_offline) const {
  if (below.empty()) return true;
  std::vector<double> w(below.size());
  weights_.fill(w, 1 - static_cast<long>(n_offline), last_time(below.size() + 1, n_offline));
  double total = 0, acc = 0;
  for (std::size_t k = 0; k < below.size(); ++k) {
    total += w[k];
    if (below[k]) acc += w[k];
  }
  if (!(total > 0)) throw DomainError("total weight must be positive");
  return acc >= (1 - beta_) * total;
}

bool EarlierOutcomeRule::select(const SequenceView& view) const {
  const double m = (*mu_)(view.x(view.last()));
  std::vector<std::uint8_t> below(view.last());
  for (std::size_t p = 0; p < view.last(); ++p) below[p] = view.y(p) <= m;
  return decide(below, view.offline_size());
}

}  // namespace pemi
