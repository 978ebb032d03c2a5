#include "pemi/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pemi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Infinite endpoints are never members.
Interval normalized(Interval iv) {
  if (std::isinf(iv.lo)) iv.lo_closed = false;
  if (std::isinf(iv.hi)) iv.hi_closed = false;
  return iv;
}

// True when a and b (a starting first) overlap or touch without a gap.
bool joins(const Interval& a, const Interval& b) {
  return b.lo < a.hi || (b.lo == a.hi && (a.hi_closed || b.lo_closed));
}

}  // namespace

IntervalSet::IntervalSet(std::vector<Interval> parts) {
  for (auto& iv : parts) {
    iv = normalized(iv);
    if (!iv.empty()) parts_.push_back(iv);
  }
  std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.lo_closed && !b.lo_closed);
  });
  std::vector<Interval> merged;
  for (const auto& iv : parts_) {
    if (!merged.empty() && joins(merged.back(), iv)) {
      auto& m = merged.back();
      if (iv.hi > m.hi) {
        m.hi = iv.hi;
        m.hi_closed = iv.hi_closed;
      } else if (iv.hi == m.hi) {
        m.hi_closed = m.hi_closed || iv.hi_closed;
      }
    } else {
      merged.push_back(iv);
    }
  }
  parts_ = std::move(merged);
}

IntervalSet IntervalSet::everything() { return IntervalSet({Interval{-kInf, kInf, false, false}}); }

bool IntervalSet::contains(double y) const {
  return std::any_of(parts_.begin(), parts_.end(), [y](const Interval& iv) { return iv.contains(y); });
}

ExtendedReal IntervalSet::measure() const {
  double total = 0;
  for (const auto& iv : parts_) total += iv.hi - iv.lo;
  return total;
}

IntervalSet IntervalSet::intersect(const Interval& window) const {
  std::vector<Interval> out;
  for (const auto& iv : parts_) {
    Interval r = iv;
    if (window.lo > r.lo || (window.lo == r.lo && !window.lo_closed)) {
      r.lo = window.lo;
      r.lo_closed = window.lo_closed;
    }
    if (window.hi < r.hi || (window.hi == r.hi && !window.hi_closed)) {
      r.hi = window.hi;
      r.hi_closed = window.hi_closed;
    }
    out.push_back(r);
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  std::vector<Interval> all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  return IntervalSet(std::move(all));
}

bool operator==(const IntervalSet& a, const IntervalSet& b) {
  if (a.parts_.size() != b.parts_.size()) return false;
  for (std::size_t i = 0; i < a.parts_.size(); ++i) {
    const auto &x = a.parts_[i], &y = b.parts_[i];
    if (x.lo != y.lo || x.hi != y.hi || x.lo_closed != y.lo_closed || x.hi_closed != y.hi_closed) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const IntervalSet& s) {
  if (s.empty()) return os << "{}";
  for (std::size_t i = 0; i < s.parts_.size(); ++i) {
    const auto& iv = s.parts_[i];
    if (i) os << " U ";
    os << (iv.lo_closed ? '[' : '(') << ExtendedReal(iv.lo) << ", " << ExtendedReal(iv.hi)
       << (iv.hi_closed ? ']' : ')');
  }
  return os;
}

}  // namespace pemi
