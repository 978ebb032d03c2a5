#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "pemi/predictor.hpp"
#include "pemi/rule.hpp"
#include "pemi/sequence.hpp"

namespace pemi {

/// Offline calibration data plus m unlabeled test points.
struct MultiTestData {
  std::vector<LabeledPoint> calib;
  std::vector<Features> tests;

  /// Calibration points followed by test point j as the unlabeled last slot.
  DataSequence with_test(std::size_t j) const { return DataSequence(calib, tests[j]); }
};

/// What a multi-test rule sees: calibration positions 0..n-1 of a (permuted)
/// view, and the test covariates with test j's slot filled from the view's
/// last position.
struct MultiTestView {
  const SequenceView& calib;
  std::span<const Features> tests;
  std::size_t j;

  std::size_t n() const { return calib.last(); }
  std::size_t m() const { return tests.size(); }
  std::span<const double> test_x(std::size_t k) const { return k == j ? calib.x(calib.last()) : tests[k]; }
};

/// A selection rule S(D_calib, D_test) -> subset of {0..m-1}.
class MultiSelectionRule {
 public:
  virtual ~MultiSelectionRule() = default;
  virtual bool selects(const MultiTestView& view, std::size_t k) const = 0;
  virtual RuleCapabilities capabilities() const { return {}; }
  virtual std::string name() const = 0;

  std::vector<std::size_t> selected(const MultiTestView& view) const;
  std::vector<std::size_t> selected(const MultiTestData& data) const;
};

/// Selects the test points whose prediction is among the K largest of the
/// test batch (ties admit every tied point) and, when gate_q > 0, at least
/// wQ(1 - gate_q) of the calibration predictions. Equal calibration weights
/// give a rule symmetric in the calibration data; other weights break the
/// symmetry.
class TopKRule final : public MultiSelectionRule {
 public:
  TopKRule(PredictorPtr mu, std::size_t K, double gate_q = 0.0,
           PositionWeights calib_weights = PositionWeights::equal());

  bool selects(const MultiTestView& view, std::size_t k) const override;
  RuleCapabilities capabilities() const override { return {true, true}; }
  std::string name() const override { return "top_k"; }

 private:
  PredictorPtr mu_;
  std::size_t K_;
  double gate_q_;
  PositionWeights weights_;
};

}  // namespace pemi
