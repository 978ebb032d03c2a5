#include "pemi/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pemi/errors.hpp"

namespace pemi {

ExtendedReal augmented_quantile_rank(std::size_t k, std::span<const double> values) {
  if (k == 0) throw DomainError("quantile rank must be >= 1");
  if (k > values.size()) return ExtendedReal::infinity();
  std::vector<double> v(values.begin(), values.end());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k - 1), v.end());
  return v[k - 1];
}

ExtendedReal augmented_quantile(double beta, std::span<const double> values) {
  if (!(beta > 0)) throw DomainError("quantile level must be positive");
  if (values.empty()) return ExtendedReal::infinity();
  const double k = std::ceil(beta * static_cast<double>(values.size()));
  if (k > static_cast<double>(values.size())) return ExtendedReal::infinity();
  return augmented_quantile_rank(static_cast<std::size_t>(std::max(k, 1.0)), values);
}

double weighted_quantile(double beta, std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw DomainError("values and weights differ in length");
  if (!(beta > 0) || beta > 1) throw DomainError("weighted quantile level must lie in (0, 1]");
  double total = 0;
  for (double w : weights) {
    if (!(w >= 0)) throw DomainError("weights must be non-negative");
    total += w;
  }
  if (!(total > 0)) throw DomainError("total weight must be positive");

  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return values[a] < values[b]; });

  // Accumulate whole tie groups so the CDF is evaluated only at distinct values.
  const double target = beta * total;
  double cum = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double z = values[order[i]];
    while (i < order.size() && values[order[i]] == z) cum += weights[order[i++]];
    if (cum >= target) return z;
  }
  return values[order.back()];
}

}  // namespace pemi
