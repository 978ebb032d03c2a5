#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pemi/descriptor.hpp"
#include "pemi/predictor.hpp"
#include "pemi/sequence.hpp"

namespace pemi::bench {

/// Malformed or inconsistent input data (the CLI maps it to exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Setting { nonlinear_1d, setting3_20d };

struct GeneratorConfig {
  Setting setting = Setting::nonlinear_1d;
  double sigma = 1.0;
  std::uint64_t seed = 0;
};

/// 3 sin(4 pi x) + 4 max(0, x - 0.3)^2 - 4 max(0, -(x + 0.4))^2.
double mu_nonlinear(double x);
/// 5 (x_1 x_2 + exp(x_4 - 1)), 1-based coordinates.
double mu_setting3(std::span<const double> x);
/// True regression function of a setting.
double true_mean(Setting s, std::span<const double> x);

/// X ~ Unif[-1, 1], Y = mu(X) + N(0, [sigma (0.5 + |X|)]^2), i.i.d.
std::vector<LabeledPoint> gen_nonlinear(const GeneratorConfig& config, std::size_t n);
/// X ~ Unif[-1, 1]^20, Y = mu(X) + N(0, [sigma (5.5 - |mu(X)|) / 2]^2), i.i.d.
std::vector<LabeledPoint> gen_setting3(const GeneratorConfig& config, std::size_t n);
std::vector<LabeledPoint> generate(const GeneratorConfig& config, std::size_t n);

/// Ordinary least squares with intercept. Throws DataError when the design is
/// rank deficient or empty.
LinearPredictor fit_ols(std::span<const LabeledPoint> train);

/// Split conformal set calibrated on every labeled point of seq: the
/// ceil((1 - alpha) t)-th smallest score of the t - 1 labeled points plus +inf.
PredictionSetDescriptor vanilla_cp_set(const DataSequence& seq, const LastPointScore& score, double alpha);

/// A CSV stream. Either raw features (x_0, x_1, ...) or precomputed
/// predictions (mu_hat, optionally f1..fk for ensembles and q_lo, q_hi for
/// quantile scores), always a label y and optionally a cutoff c.
struct Dataset {
  std::vector<std::string> feature_columns;
  std::vector<LabeledPoint> rows;
  bool has_cutoff = false;

  bool has_predictions() const { return !feature_columns.empty() && feature_columns.front() == "mu_hat"; }
  /// Index of a feature column, or npos.
  std::size_t column(const std::string& name) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Throws DataError naming the line of a malformed row or the missing column.
Dataset load_dataset(const std::string& path);
Dataset parse_dataset(const std::string& text, const std::string& origin = "<string>");
void write_dataset(const std::string& path, const Dataset& data);
std::string format_dataset(const Dataset& data);

/// Shortest decimal form that reads back to the same double; "inf"/"-inf"
/// for infinities.
std::string format_double(double v);
/// Inverse of format_double; throws std::invalid_argument.
double parse_double(const std::string& s);

}  // namespace pemi::bench
