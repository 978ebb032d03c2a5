#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pemi/predictor.hpp"
#include "pemi/rule.hpp"
#include "pemi/threshold.hpp"

namespace pemi {

/// S_t = 1{mu_hat(X_t) >= tau1 + (1/tau0) sum_{i<t} S_i}. Only online
/// positions are time steps.
class DecisionDrivenRule final : public SelectionRule {
 public:
  DecisionDrivenRule(PredictorPtr mu, double tau0 = 200.0, double tau1 = 5.5);

  bool select(const SequenceView& view) const override;
  Trajectory trajectory(const SequenceView& view) const override;
  RuleCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return "decision_driven"; }

  /// The rule in closed form: decision given mu_hat(X_t) and sum_{i<t} S_i.
  bool decide(double mu_t, std::size_t past_selections) const {
    return mu_t >= tau1_ + static_cast<double>(past_selections) / tau0_;
  }

 private:
  PredictorPtr mu_;
  double tau0_, tau1_;
};

/// Compares mu_hat(X_t) with a weighted summary of the earlier predictions:
///   quantile: mu_hat(X_t) > wQ(1 - q_sel; {mu_hat(X_i)}_{i<t})
///   average:  mu_hat(X_t) > sum_i w_i mu_hat(X_i) / sum_i w_i
/// With no history the point is selected.
class WeightedPredictionRule final : public SelectionRule {
 public:
  enum class Mode { quantile, average };

  WeightedPredictionRule(PredictorPtr mu, Mode mode, double q_sel = 0.1,
                         PositionWeights weights = PositionWeights::geometric(0.5));

  bool select(const SequenceView& view) const override;
  RuleCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return mode_ == Mode::quantile ? "weighted_quantile" : "weighted_average"; }

 private:
  PredictorPtr mu_;
  Mode mode_;
  double q_sel_;
  PositionWeights weights_;
};

/// Selects when the disagreement s_t = Var({f_j(X_t)}) reaches tau_t, the
/// cutoff maximising the admitted past uncertainty subject to admitting at
/// most a gamma fraction of the history. tau_t is the smallest past variance
/// v with #{s_i >= v} <= floor(gamma (t-1)), or +inf if there is none.
class UncertaintyBudgetRule final : public SelectionRule {
 public:
  UncertaintyBudgetRule(std::vector<PredictorPtr> models, double gamma);

  bool select(const SequenceView& view) const override;
  RuleCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return "uncertainty_budget"; }

  /// Population variance of the model outputs at x.
  double disagreement(std::span<const double> x) const;
  /// tau_t from the past disagreements.
  double budget_threshold(std::span<const double> past) const;

 private:
  std::vector<PredictorPtr> models_;
  double gamma_;
};

/// (w_t + sum_{i<t} w_i 1{f_i >= f_t, null_i}) / sum_{i<=t} w_i over positions
/// 1..t; f, null and w have t entries, the last being the test point (its
/// null entry is ignored). Throws DomainError on zero total weight.
double weighted_conformal_pvalue(std::span<const double> f, std::span<const std::uint8_t> null,
                                 std::span<const double> w);

/// Rule reading labels only through the null indicators 1{y_i <= c_i}. The
/// decision is a function of per-position conformal scores F(x_i, c_i) and
/// those indicators, which is what the cutoff fast paths exploit.
class CutoffRule : public SelectionRule {
 public:
  /// Decision at the last position. `f` and `null` have one entry per
  /// position of the view; null[last] is never read.
  virtual bool select_from(std::span<const double> f, std::span<const std::uint8_t> null,
                           std::size_t n_offline) const = 0;
  virtual Trajectory trajectory_from(std::span<const double> f, std::span<const std::uint8_t> null,
                                     std::size_t n_offline) const;

  double conformal_score(std::span<const double> x, double c) const { return (*mu_)(x) - c; }

  bool select(const SequenceView& view) const final;
  Trajectory trajectory(const SequenceView& view) const final;
  RuleCapabilities capabilities() const override { return {false, true}; }

 protected:
  explicit CutoffRule(PredictorPtr mu) : mu_(std::move(mu)) {}

 private:
  // Extracts F and the indicators from a view; throws ConfigError without cutoffs.
  void extract(const SequenceView& view, std::vector<double>& f, std::vector<std::uint8_t>& null) const;

  PredictorPtr mu_;
};

/// Weighted conformal p-value
///   p_t^w = (w_t + sum_{i<t} w_i 1{F_i >= F_t, Y_i <= c_i}) / sum_{i<=t} w_i
/// with F(x, c) = mu_hat(x) - c, thresholded at alpha_t from a threshold
/// engine replayed over the whole p-value history. Only online positions are
/// used; weights attach to positions.
class ConformalPValueRule final : public CutoffRule {
 public:
  ConformalPValueRule(PredictorPtr mu, EnginePtr engine, PositionWeights weights = PositionWeights::equal());

  bool select_from(std::span<const double> f, std::span<const std::uint8_t> null,
                   std::size_t n_offline) const override;
  Trajectory trajectory_from(std::span<const double> f, std::span<const std::uint8_t> null,
                             std::size_t n_offline) const override;
  std::string name() const override { return "conformal_pvalue"; }

  /// p_j for every online position j of the view.
  std::vector<double> pvalues(std::span<const double> f, std::span<const std::uint8_t> null,
                              std::size_t n_offline) const;
  /// p_j for the single online position j (1-based).
  double pvalue_at(std::span<const double> f, std::span<const std::uint8_t> null, std::size_t n_offline,
                   std::size_t j) const;

 private:
  EnginePtr engine_;
  PositionWeights weights_;
};

/// e-LOND over conformal e-values built from an offline block:
///   p_j^- = #{offline i : F_i >= F_j, Y_i <= c_i} / (n+1),  p_j^+ = p_j^- + 1/(n+1),
///   E_j = 1{p_j^+ <= alpha_j^{LOND,+}} / alpha_j^{LOND,-},
/// selecting j iff E_j >= 1 / (alpha gamma_j (R_{j-1} + 1)). With a seed the
/// randomized variant compares E_j >= U_j / alpha_j with U_j uniform per
/// online position.
class ELondRule final : public CutoffRule {
 public:
  ELondRule(PredictorPtr mu, double alpha, GammaSequence gamma = GammaSequence::default_lond(),
            std::optional<std::uint64_t> randomize_seed = std::nullopt);

  bool select_from(std::span<const double> f, std::span<const std::uint8_t> null,
                   std::size_t n_offline) const override;
  Trajectory trajectory_from(std::span<const double> f, std::span<const std::uint8_t> null,
                             std::size_t n_offline) const override;
  std::string name() const override { return "elond"; }

  /// e-values E_1..E_t of the online positions.
  std::vector<double> evalues(std::span<const double> f, std::span<const std::uint8_t> null,
                              std::size_t n_offline) const;

 private:
  double alpha_;
  GammaSequence gamma_;
  std::optional<std::uint64_t> seed_;
};

/// Selects when mu_hat(X_t) >= wQ(1 - beta; {Y_i}_{i<t}), i.e. when
/// sum_{i<t} w_i 1{Y_i <= mu_hat(X_t)} >= (1 - beta) sum_{i<t} w_i.
/// With no history the point is selected.
class EarlierOutcomeRule final : public SelectionRule {
 public:
  EarlierOutcomeRule(PredictorPtr mu, double beta, PositionWeights weights = PositionWeights::equal());

  bool select(const SequenceView& view) const override;
  std::string name() const override { return "earlier_outcome"; }

  /// Decision from below[k] = 1{Y at position k <= mu_hat(X_t)}, k < last.
  bool decide(std::span<const std::uint8_t> below, std::size_t n_offline) const;
  double predict(std::span<const double> x) const { return (*mu_)(x); }

 private:
  PredictorPtr mu_;
  double beta_;
  PositionWeights weights_;
};

}  // namespace pemi
