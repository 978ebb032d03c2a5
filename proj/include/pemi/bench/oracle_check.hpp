#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pemi::bench {

struct OracleCheckOptions {
  std::size_t instances = 50;
  std::uint64_t seed = 0;
  std::size_t grid = 100;
  /// Largest t compared against full enumeration.
  std::size_t full_max_t = 5;
  /// Instantiation names to run; empty runs all of them.
  std::vector<std::string> only;
};

/// Agreement counts for one closed-form instantiation.
struct OracleCheckLine {
  std::string instantiation;
  std::size_t instances = 0;
  std::size_t points = 0;  // labels compared against the generic engine
  std::size_t mismatches = 0;
  std::size_t full_points = 0;  // labels compared against full enumeration
  std::size_t full_mismatches = 0;
};

/// Names accepted in OracleCheckOptions::only.
std::vector<std::string> oracle_check_instantiations();

/// Random instances with t in {3..7} and M in {0, 5, 20}; each closed-form set
/// is compared label by label with the generic engine on a grid spanning the
/// observed scores (plus every score, cutoff and breakpoint position), and for
/// t <= full_max_t also with all permutations in place of the sample.
std::vector<OracleCheckLine> oracle_check(const OracleCheckOptions& options);

}  // namespace pemi::bench
