#pragma once

#include <ostream>
#include <vector>

#include "pemi/extended_real.hpp"

namespace pemi {

struct Interval {
  double lo;
  double hi;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double y) const {
    return (lo < y || (lo_closed && lo == y)) && (y < hi || (hi_closed && hi == y));
  }
  bool empty() const { return lo > hi || (lo == hi && !(lo_closed && hi_closed)); }
};

/// A finite union of intervals of the real line, kept sorted and disjoint.
/// Endpoints may be +-inf (an infinite endpoint is never "closed").
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);

  static IntervalSet everything();
  static IntervalSet point(double y) { return IntervalSet({Interval{y, y}}); }

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool contains(double y) const;
  /// Lebesgue measure; +inf for unbounded sets.
  ExtendedReal measure() const;

  IntervalSet intersect(const Interval& window) const;
  IntervalSet unite(const IntervalSet& other) const;

  friend bool operator==(const IntervalSet&, const IntervalSet&);
  friend std::ostream& operator<<(std::ostream& os, const IntervalSet& s);

 private:
  std::vector<Interval> parts_;
};

}  // namespace pemi
