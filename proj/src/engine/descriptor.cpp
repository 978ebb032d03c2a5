#include "pemi/descriptor.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace pemi {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

std::ostream& operator<<(std::ostream& os, const ScoreBound& b) {
  return os << (b.inclusive ? "v <= " : "v < ") << b.value;
}

}  // namespace

bool contains(const PredictionSetDescriptor& set, const LastPointScore& score, std::span<const double> x, double y) {
  return std::visit(
      overloaded{
          [&](const Threshold& s) { return s.bound.admits(score.score(x, y)); },
          [&](const PiecewiseByCutoff& s) { return (y > s.cutoff ? s.above : s.below).admits(score.score(x, y)); },
          [&](const IntervalUnion& s) {
            if (std::binary_search(s.breakpoints.begin(), s.breakpoints.end(), y))
              return std::find(s.boundary_points.begin(), s.boundary_points.end(), y) != s.boundary_points.end();
            const auto j = std::upper_bound(s.breakpoints.begin(), s.breakpoints.end(), y) - s.breakpoints.begin();
            return s.bounds[static_cast<std::size_t>(j)].admits(score.score(x, y));
          },
          [&](const Everything&) { return true; },
          [&](const FiniteLabels& s) { return std::find(s.labels.begin(), s.labels.end(), y) != s.labels.end(); },
      },
      set);
}

IntervalSet materialize(const PredictionSetDescriptor& set, const LastPointScore& score, std::span<const double> x) {
  return std::visit(
      overloaded{
          [&](const Threshold& s) { return score.sublevel(x, s.bound); },
          [&](const PiecewiseByCutoff& s) {
            return score.sublevel(x, s.above)
                .intersect(Interval{s.cutoff, kInf, false, false})
                .unite(score.sublevel(x, s.below).intersect(Interval{-kInf, s.cutoff, false, true}));
          },
          [&](const IntervalUnion& s) {
            IntervalSet out;
            for (std::size_t j = 0; j < s.bounds.size(); ++j) {
              const double lo = j == 0 ? -kInf : s.breakpoints[j - 1];
              const double hi = j == s.breakpoints.size() ? kInf : s.breakpoints[j];
              out = out.unite(score.sublevel(x, s.bounds[j]).intersect(Interval{lo, hi, false, false}));
            }
            for (double b : s.boundary_points) out = out.unite(IntervalSet::point(b));
            return out;
          },
          [&](const Everything&) { return IntervalSet::everything(); },
          [&](const FiniteLabels& s) {
            IntervalSet out;
            for (double y : s.labels) out = out.unite(IntervalSet::point(y));
            return out;
          },
      },
      set);
}

ExtendedReal set_size(const PredictionSetDescriptor& set, const LastPointScore& score, std::span<const double> x) {
  return materialize(set, score, x).measure();
}

std::string describe(const PredictionSetDescriptor& set) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Threshold& s) { os << "threshold(" << s.bound << ")"; },
                 [&](const PiecewiseByCutoff& s) {
                   os << "piecewise(c=" << s.cutoff << "; y>c: " << s.above << "; y<=c: " << s.below << ")";
                 },
                 [&](const IntervalUnion& s) {
                   os << "intervals(" << s.bounds.size() << " pieces, " << s.boundary_points.size()
                      << " boundary points)";
                 },
                 [&](const Everything&) { os << "everything"; },
                 [&](const FiniteLabels& s) { os << "labels(" << s.labels.size() << ")"; },
             },
             set);
  return os.str();
}

}  // namespace pemi
