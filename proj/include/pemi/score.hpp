#pragma once

#include <span>
#include <string>

#include "pemi/extended_real.hpp"
#include "pemi/interval_set.hpp"
#include "pemi/predictor.hpp"
#include "pemi/sequence.hpp"

namespace pemi {

/// Upper bound on a conformity score: {v <= value} or, when not inclusive,
/// {v < value}. Exclusive bounds only come out of the randomized sets.
struct ScoreBound {
  ExtendedReal value = ExtendedReal::infinity();
  bool inclusive = true;

  bool admits(double v) const { return inclusive ? v <= value.value() : v < value.value(); }
  friend bool operator==(const ScoreBound&, const ScoreBound&) = default;
};

/// Order-sensitive conformity score V_t(z_1, ..., z_t); larger means less
/// conforming. Evaluated on a view whose last position carries a label.
class ConformityScore {
 public:
  virtual ~ConformityScore() = default;
  virtual double operator()(const SequenceView& labeled) const = 0;
  virtual std::string name() const = 0;
};

/// A score that reads only the last point, V_t = v(x_t, y_t). Required by the
/// closed-form paths, which also need the inverse map tau -> {y : v(x, y) <= tau}.
class LastPointScore : public ConformityScore {
 public:
  virtual double score(std::span<const double> x, double y) const = 0;
  virtual IntervalSet sublevel(std::span<const double> x, ScoreBound bound) const = 0;

  double operator()(const SequenceView& labeled) const final {
    return score(labeled.x(labeled.last()), labeled.y(labeled.last()));
  }
};

/// v(x, y) = |y - mu_hat(x)|.
class ResidualScore final : public LastPointScore {
 public:
  explicit ResidualScore(PredictorPtr mu) : mu_(std::move(mu)) {}
  double score(std::span<const double> x, double y) const override;
  IntervalSet sublevel(std::span<const double> x, ScoreBound bound) const override;
  std::string name() const override { return "residual"; }

 private:
  PredictorPtr mu_;
};

/// Conformalized quantile regression: v(x, y) = max(lo(x) - y, y - hi(x)).
class CqrScore final : public LastPointScore {
 public:
  CqrScore(PredictorPtr lo, PredictorPtr hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}
  double score(std::span<const double> x, double y) const override;
  IntervalSet sublevel(std::span<const double> x, ScoreBound bound) const override;
  std::string name() const override { return "cqr"; }

 private:
  PredictorPtr lo_, hi_;
};

}  // namespace pemi
