#include "pemi/score.hpp"

#include <cmath>

namespace pemi {
namespace {

// Sublevel sets of residual-type scores are the band [a - tau, b + tau]. The
// ends computed in floating point can be an ulp off the set the score itself
// admits, so each end is moved onto the last admitted double.
template <class Score>
IntervalSet band(double a, double b, ScoreBound bound, Score score) {
  if (bound.value.is_pos_infinity()) return IntervalSet::everything();
  const double tau = bound.value.value();
  if (std::isinf(tau)) return {};
  const auto in = [&](double y) { return bound.admits(score(y)); };
  const auto settle = [&](double y, double outward) {
    constexpr int kMaxSteps = 64;
    const double inward = -outward;
    int steps = 0;
    if (in(y)) {
      while (steps++ < kMaxSteps && in(std::nextafter(y, outward))) y = std::nextafter(y, outward);
    } else {
      while (steps++ < kMaxSteps && !in(y)) y = std::nextafter(y, inward);
    }
    return y;
  };
  const double lo = settle(a - tau, -INFINITY), hi = settle(b + tau, INFINITY);
  if (lo > hi || !in(lo) || !in(hi)) return {};
  return IntervalSet({Interval{lo, hi, true, true}});
}

}  // namespace

double ResidualScore::score(std::span<const double> x, double y) const { return std::abs(y - (*mu_)(x)); }

IntervalSet ResidualScore::sublevel(std::span<const double> x, ScoreBound bound) const {
  const double m = (*mu_)(x);
  return band(m, m, bound, [&](double y) { return std::abs(y - m); });
}

double CqrScore::score(std::span<const double> x, double y) const {
  return std::max((*lo_)(x) - y, y - (*hi_)(x));
}

IntervalSet CqrScore::sublevel(std::span<const double> x, ScoreBound bound) const {
  const double lo = (*lo_)(x), hi = (*hi_)(x);
  return band(lo, hi, bound, [&](double y) { return std::max(lo - y, y - hi); });
}

}  // namespace pemi
