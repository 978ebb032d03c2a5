#pragma once

#include <cmath>
#include <vector>

#include "pemi/random.hpp"
#include "pemi/sequence.hpp"

namespace pemi::test {

/// Points with features [mu_hat, f1, f2] and labels near mu_hat; `coarse`
/// rounds to a half-integer lattice so that scores tie.
inline std::vector<LabeledPoint> random_points(SplitMix64& gen, std::size_t n, bool coarse = false) {
  const auto r = [&](double v) { return coarse ? std::round(v * 2.0) / 2.0 : v; };
  std::vector<LabeledPoint> out(n);
  for (auto& p : out) {
    const double mu = r(4.0 * uniform01(gen) - 2.0);
    p.x = {mu, r(mu + uniform01(gen) - 0.5), r(mu + uniform01(gen) - 0.5)};
    p.y = r(mu + 3.0 * uniform01(gen) - 1.5);
    p.cutoff = 0.0;
  }
  return out;
}

inline DataSequence make_sequence(std::vector<LabeledPoint> pts, std::size_t n_offline = 0) {
  LabeledPoint test = pts.back();
  pts.pop_back();
  std::vector<LabeledPoint> off(pts.begin(), pts.begin() + static_cast<long>(n_offline));
  std::vector<LabeledPoint> lab(pts.begin() + static_cast<long>(n_offline), pts.end());
  return DataSequence::with_offline(std::move(off), std::move(lab), test.x, test.cutoff);
}

}  // namespace pemi::test
