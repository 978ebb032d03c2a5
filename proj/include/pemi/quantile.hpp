#pragma once

#include <cstddef>
#include <span>

#include "pemi/extended_real.hpp"

namespace pemi {

/// k-th smallest element of values ∪ {+inf} (1-based k, k >= 1).
ExtendedReal augmented_quantile_rank(std::size_t k, std::span<const double> values);

/// k-th smallest of values ∪ {+inf} with k = ceil(beta * |values|).
/// beta may exceed 1; beta <= 0 throws DomainError.
ExtendedReal augmented_quantile(double beta, std::span<const double> values);

/// inf{z : sum_i w_i 1{v_i <= z} / sum_i w_i >= beta}, for 0 < beta <= 1.
double weighted_quantile(double beta, std::span<const double> values, std::span<const double> weights);

}  // namespace pemi
