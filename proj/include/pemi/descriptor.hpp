#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pemi/interval_set.hpp"
#include "pemi/score.hpp"

namespace pemi {

/// {y : v(x_t, y) within bound}.
struct Threshold {
  ScoreBound bound;
};

/// {y > cutoff : v within above} U {y <= cutoff : v within below}.
struct PiecewiseByCutoff {
  double cutoff;
  ScoreBound above;
  ScoreBound below;
};

/// Open intervals between sorted breakpoints b_1 < ... < b_D, each with its own
/// score bound (bounds.size() == D + 1), plus the breakpoints that belong to
/// the set.
struct IntervalUnion {
  std::vector<double> breakpoints;
  std::vector<ScoreBound> bounds;
  std::vector<double> boundary_points;
};

struct Everything {};

struct FiniteLabels {
  std::vector<double> labels;
};

/// A prediction set in symbolic form; materialised through a last-point score.
using PredictionSetDescriptor = std::variant<Threshold, PiecewiseByCutoff, IntervalUnion, Everything, FiniteLabels>;

/// Membership of y, decided with the score itself rather than its inverse.
bool contains(const PredictionSetDescriptor& set, const LastPointScore& score, std::span<const double> x, double y);

/// The label set as a union of intervals (FiniteLabels become points).
IntervalSet materialize(const PredictionSetDescriptor& set, const LastPointScore& score, std::span<const double> x);

/// Lebesgue measure of the materialised set.
ExtendedReal set_size(const PredictionSetDescriptor& set, const LastPointScore& score, std::span<const double> x);

std::string describe(const PredictionSetDescriptor& set);

}  // namespace pemi
