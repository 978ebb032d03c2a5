#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pemi {

/// Non-negative sequence gamma_1, gamma_2, ... with sum <= 1.
class GammaSequence {
 public:
  /// gamma_t = 6 / (pi^2 t^2).
  static GammaSequence default_lond();
  /// gamma_t = c / t^s with c normalising the series to 1 (s > 1).
  static GammaSequence power(double s);
  /// Explicit prefix; terms past the end are zero. Throws ConfigError on a
  /// negative term or a sum above 1.
  static GammaSequence explicit_terms(std::vector<double> terms);

  double operator()(std::size_t t) const;

 private:
  enum class Kind { power, terms };
  GammaSequence(Kind k, double s, double c, std::vector<double> terms)
      : kind_(k), s_(s), c_(c), terms_(std::move(terms)) {}

  Kind kind_;
  double s_;
  double c_;
  std::vector<double> terms_;
};

/// alpha * gamma_t * (rejections + 1). Throws ConfigError when gamma_t lies
/// outside [0, 1].
double lond_threshold(double alpha, double gamma_t, std::size_t rejections);

/// alpha_t = G(t; {p_i, alpha_i}_{i<t}, theta). Stateless: any state is rebuilt
/// from the supplied history, so one engine serves every permutation.
class ThresholdEngine {
 public:
  virtual ~ThresholdEngine() = default;

  /// Threshold for time t = past_p.size() + 1.
  virtual double threshold(std::span<const double> past_p, std::span<const double> past_alpha) const = 0;

  /// alpha_j for every j of a p-value stream (alpha_j sees p_1..p_{j-1}).
  virtual void replay(std::span<const double> p, std::span<double> alpha_out) const;

  /// False when alpha_t ignores the history (lets callers skip the replay).
  virtual bool uses_history() const { return true; }
  virtual std::string name() const = 0;
};

using EnginePtr = std::shared_ptr<const ThresholdEngine>;

class FixedThreshold final : public ThresholdEngine {
 public:
  explicit FixedThreshold(double q);
  double threshold(std::span<const double>, std::span<const double>) const override { return q_; }
  void replay(std::span<const double> p, std::span<double> alpha_out) const override;
  bool uses_history() const override { return false; }
  std::string name() const override { return "fixed"; }

 private:
  double q_;
};

class LondEngine final : public ThresholdEngine {
 public:
  LondEngine(double alpha, GammaSequence gamma = GammaSequence::default_lond());
  double threshold(std::span<const double> past_p, std::span<const double> past_alpha) const override;
  void replay(std::span<const double> p, std::span<double> alpha_out) const override;
  std::string name() const override { return "lond"; }

 private:
  double alpha_;
  GammaSequence gamma_;
};

/// SAFFRON (Ramdas et al., 2018) with candidacy level lambda and initial
/// wealth w0 <= alpha.
class SaffronEngine final : public ThresholdEngine {
 public:
  SaffronEngine(double alpha, double lambda = 0.5, double w0 = -1, GammaSequence gamma = GammaSequence::power(1.6));
  double threshold(std::span<const double> past_p, std::span<const double> past_alpha) const override;
  std::string name() const override { return "saffron"; }

 private:
  double alpha_, lambda_, w0_;
  GammaSequence gamma_;
};

/// ADDIS (Tian & Ramdas, 2019): SAFFRON on the p-values that survive the
/// discarding level tau, with candidacy level lambda < tau.
class AddisEngine final : public ThresholdEngine {
 public:
  AddisEngine(double alpha, double lambda = 0.25, double tau = 0.5, double w0 = -1,
              GammaSequence gamma = GammaSequence::power(1.6));
  double threshold(std::span<const double> past_p, std::span<const double> past_alpha) const override;
  std::string name() const override { return "addis"; }

 private:
  double alpha_, lambda_, tau_, w0_;
  GammaSequence gamma_;
};

}  // namespace pemi
