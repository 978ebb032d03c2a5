#include "pemi/threshold.hpp"

#include <cmath>
#include <numbers>

#include "pemi/errors.hpp"

namespace pemi {
namespace {

// Riemann zeta(s) for s > 1, to double precision (Euler-Maclaurin tail).
double zeta(double s) {
  constexpr int N = 64;
  double sum = 0;
  for (int k = 1; k < N; ++k) sum += std::pow(k, -s);
  const double n = N;
  return sum + std::pow(n, 1 - s) / (s - 1) + 0.5 * std::pow(n, -s) + s * std::pow(n, -s - 1) / 12.0;
}

}  // namespace

GammaSequence GammaSequence::default_lond() { return GammaSequence(Kind::power, 2.0, 6.0 / (std::numbers::pi * std::numbers::pi), {}); }

GammaSequence GammaSequence::power(double s) {
  if (!(s > 1)) throw ConfigError("gamma exponent must exceed 1");
  return GammaSequence(Kind::power, s, 1.0 / zeta(s), {});
}

GammaSequence GammaSequence::explicit_terms(std::vector<double> terms) {
  double sum = 0;
  for (double g : terms) {
    if (!(g >= 0)) throw ConfigError("gamma terms must be non-negative");
    sum += g;
  }
  if (sum > 1 + 1e-12) throw ConfigError("gamma terms must sum to at most 1");
  return GammaSequence(Kind::terms, 0, 0, std::move(terms));
}

double GammaSequence::operator()(std::size_t t) const {
  if (t == 0) throw DomainError("gamma is indexed from 1");
  if (kind_ == Kind::terms) return t <= terms_.size() ? terms_[t - 1] : 0.0;
  const double td = static_cast<double>(t);
  return s_ == 2.0 ? c_ / (td * td) : c_ * std::pow(td, -s_);
}

double lond_threshold(double alpha, double gamma_t, std::size_t rejections) {
  if (!(gamma_t >= 0 && gamma_t <= 1)) throw ConfigError("gamma_t must lie in [0, 1]");
  return alpha * gamma_t * static_cast<double>(rejections + 1);
}

void ThresholdEngine::replay(std::span<const double> p, std::span<double> alpha_out) const {
  for (std::size_t j = 0; j < p.size(); ++j) alpha_out[j] = threshold(p.first(j), alpha_out.first(j));
}

FixedThreshold::FixedThreshold(double q) : q_(q) {
  if (!(q > 0 && q < 1)) throw ConfigError("fixed selection threshold must lie in (0, 1)");
}

void FixedThreshold::replay(std::span<const double> p, std::span<double> alpha_out) const {
  for (std::size_t j = 0; j < p.size(); ++j) alpha_out[j] = q_;
}

LondEngine::LondEngine(double alpha, GammaSequence gamma) : alpha_(alpha), gamma_(std::move(gamma)) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("LOND level must lie in (0, 1)");
}

double LondEngine::threshold(std::span<const double> past_p, std::span<const double> past_alpha) const {
  std::size_t r = 0;
  for (std::size_t i = 0; i < past_p.size(); ++i) r += past_p[i] <= past_alpha[i];
  return lond_threshold(alpha_, gamma_(past_p.size() + 1), r);
}

void LondEngine::replay(std::span<const double> p, std::span<double> alpha_out) const {
  std::size_t r = 0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    alpha_out[j] = lond_threshold(alpha_, gamma_(j + 1), r);
    r += p[j] <= alpha_out[j];
  }
}

namespace {

// SAFFRON's threshold for time t = p.size() + 1, given the history.
double saffron_level(std::span<const double> p, std::span<const double> a, double alpha, double lambda,
                     double w0, const GammaSequence& gamma) {
  const std::size_t t = p.size() + 1;
  // Candidates after each rejection time tau_j (tau_0 = 0).
  std::vector<std::size_t> tau{0};
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] <= a[i]) tau.push_back(i + 1);
  double wealth = 0;
  for (std::size_t j = 0; j < tau.size(); ++j) {
    std::size_t cand = 0;
    for (std::size_t i = tau[j]; i < p.size(); ++i) cand += p[i] <= lambda;
    const double g = gamma(t - tau[j] - cand);
    wealth += (j == 0 ? w0 : j == 1 ? alpha - w0 : alpha) * g;
  }
  return std::min(lambda, (1 - lambda) * wealth);
}

}  // namespace

SaffronEngine::SaffronEngine(double alpha, double lambda, double w0, GammaSequence gamma)
    : alpha_(alpha), lambda_(lambda), w0_(w0 < 0 ? alpha / 2 : w0), gamma_(std::move(gamma)) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("SAFFRON level must lie in (0, 1)");
  if (!(lambda > 0 && lambda < 1)) throw ConfigError("SAFFRON lambda must lie in (0, 1)");
  if (!(w0_ >= 0 && w0_ <= alpha)) throw ConfigError("SAFFRON initial wealth must lie in [0, alpha]");
}

double SaffronEngine::threshold(std::span<const double> past_p, std::span<const double> past_alpha) const {
  return saffron_level(past_p, past_alpha, alpha_, lambda_, w0_, gamma_);
}

AddisEngine::AddisEngine(double alpha, double lambda, double tau, double w0, GammaSequence gamma)
    : alpha_(alpha), lambda_(lambda), tau_(tau), w0_(w0 < 0 ? alpha / 2 : w0), gamma_(std::move(gamma)) {
  if (!(alpha > 0 && alpha < 1)) throw ConfigError("ADDIS level must lie in (0, 1)");
  if (!(lambda > 0 && lambda < tau && tau <= 1)) throw ConfigError("ADDIS needs 0 < lambda < tau <= 1");
  if (!(w0_ >= 0 && w0_ <= alpha)) throw ConfigError("ADDIS initial wealth must lie in [0, alpha]");
}

double AddisEngine::threshold(std::span<const double> past_p, std::span<const double> past_alpha) const {
  // Drop p-values above tau, rescale survivors by 1/tau, and run SAFFRON with
  // candidacy level lambda/tau; the level maps back by a factor tau.
  std::vector<double> p, a;
  for (std::size_t i = 0; i < past_p.size(); ++i) {
    if (past_p[i] > tau_) continue;
    p.push_back(past_p[i] / tau_);
    a.push_back(past_alpha[i] / tau_);
  }
  return tau_ * saffron_level(p, a, alpha_, lambda_ / tau_, w0_, gamma_);
}

}  // namespace pemi
