#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pemi {

/// A pre-trained point predictor mu_hat: X -> R.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual double operator()(std::span<const double> x) const = 0;
};

using PredictorPtr = std::shared_ptr<const Predictor>;

/// Reads one feature column. Used when features already hold model outputs.
class ColumnPredictor final : public Predictor {
 public:
  explicit ColumnPredictor(std::size_t column = 0) : column_(column) {}
  double operator()(std::span<const double> x) const override { return x[column_]; }

 private:
  std::size_t column_;
};

class LinearPredictor final : public Predictor {
 public:
  LinearPredictor(double intercept, std::vector<double> coef) : intercept_(intercept), coef_(std::move(coef)) {}
  double operator()(std::span<const double> x) const override;
  double intercept() const { return intercept_; }
  const std::vector<double>& coefficients() const { return coef_; }

 private:
  double intercept_;
  std::vector<double> coef_;
};

/// offset + scale * base(x).
class AffinePredictor final : public Predictor {
 public:
  AffinePredictor(PredictorPtr base, double offset, double scale = 1.0)
      : base_(std::move(base)), offset_(offset), scale_(scale) {}
  double operator()(std::span<const double> x) const override { return offset_ + scale_ * (*base_)(x); }

 private:
  PredictorPtr base_;
  double offset_;
  double scale_;
};

inline PredictorPtr column(std::size_t j = 0) { return std::make_shared<ColumnPredictor>(j); }

}  // namespace pemi
