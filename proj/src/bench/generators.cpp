#include <Eigen/Dense>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <numbers>

#include "pemi/bench/data.hpp"
#include "pemi/errors.hpp"
#include "pemi/fast.hpp"
#include "pemi/random.hpp"

namespace pemi::bench {

double mu_nonlinear(double x) {
  const double a = std::max(0.0, x - 0.3), b = std::max(0.0, -(x + 0.4));
  return 3.0 * std::sin(4.0 * std::numbers::pi * x) + 4.0 * a * a - 4.0 * b * b;
}

double mu_setting3(std::span<const double> x) { return 5.0 * (x[0] * x[1] + std::exp(x[3] - 1.0)); }

double true_mean(Setting s, std::span<const double> x) {
  return s == Setting::nonlinear_1d ? mu_nonlinear(x[0]) : mu_setting3(x);
}

namespace {

// Boost's normal distribution is specified algorithmically, unlike
// std::normal_distribution, so streams match across standard libraries.
template <class Noise>
std::vector<LabeledPoint> draw(const GeneratorConfig& config, std::size_t n, std::size_t dim, Noise noise_sd) {
  SplitMix64 gen(config.seed);
  boost::random::normal_distribution<double> normal;
  std::vector<LabeledPoint> out(n);
  for (auto& p : out) {
    p.x.resize(dim);
    for (auto& v : p.x) v = 2.0 * uniform01(gen) - 1.0;
    const double mu = true_mean(config.setting, p.x);
    p.y = mu + noise_sd(p.x, mu) * normal(gen);
  }
  return out;
}

}  // namespace

std::vector<LabeledPoint> gen_nonlinear(const GeneratorConfig& config, std::size_t n) {
  GeneratorConfig c = config;
  c.setting = Setting::nonlinear_1d;
  return draw(c, n, 1, [&](std::span<const double> x, double) { return c.sigma * (0.5 + std::abs(x[0])); });
}

std::vector<LabeledPoint> gen_setting3(const GeneratorConfig& config, std::size_t n) {
  GeneratorConfig c = config;
  c.setting = Setting::setting3_20d;
  return draw(c, n, 20, [&](std::span<const double>, double mu) { return c.sigma * (5.5 - std::abs(mu)) / 2.0; });
}

std::vector<LabeledPoint> generate(const GeneratorConfig& config, std::size_t n) {
  return config.setting == Setting::nonlinear_1d ? gen_nonlinear(config, n) : gen_setting3(config, n);
}

LinearPredictor fit_ols(std::span<const LabeledPoint> train) {
  if (train.empty()) throw DataError("cannot fit a linear model on no data");
  const auto d = static_cast<Eigen::Index>(train.front().x.size());
  const auto n = static_cast<Eigen::Index>(train.size());
  Eigen::MatrixXd X(n, d + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = train[static_cast<std::size_t>(i)];
    X(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) X(i, j + 1) = p.x[static_cast<std::size_t>(j)];
    y(i) = p.y;
  }
  const auto qr = X.colPivHouseholderQr();
  if (qr.rank() < d + 1) throw DataError("linear model design matrix is rank deficient");
  const Eigen::VectorXd beta = qr.solve(y);
  return LinearPredictor(beta(0), std::vector<double>(beta.data() + 1, beta.data() + beta.size()));
}

PredictionSetDescriptor vanilla_cp_set(const DataSequence& seq, const LastPointScore& score, double alpha) {
  CovariateSets sets;
  sets.ref_size = seq.size();
  for (std::size_t s = 0; s < seq.test_slot(); ++s) sets.scores_B.push_back(score.score(seq.x(s), seq.y(s)));
  // Every calibration point plays the role of a B member; the test point's own
  // +inf completes the augmented quantile.
  return Threshold{covariate_threshold(sets, alpha)};
}

}  // namespace pemi::bench
