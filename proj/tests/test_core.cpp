#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "pemi/errors.hpp"
#include "pemi/interval_set.hpp"
#include "pemi/permutation.hpp"
#include "pemi/quantile.hpp"
#include "pemi/score.hpp"

using namespace pemi;

TEST_CASE("sample_permutations: trivial ranges and determinism") {
  const auto one = sample_permutations(1, 5, 7);
  CHECK(one.size() == 5);
  for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].is_identity());

  CHECK(sample_permutations(3, 0, 0).empty());
  CHECK_THROWS_AS(sample_permutations(0, 3, 0), DomainError);

  const auto a = sample_permutations(5, 100, 42), b = sample_permutations(5, 100, 42);
  for (std::size_t i = 0; i < 100; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("sample_permutations: member i does not depend on the sample size") {
  const auto small = sample_permutations(6, 10, 3), large = sample_permutations(6, 50, 3);
  for (std::size_t i = 0; i < 10; ++i) CHECK(small[i] == large[i]);
}

TEST_CASE("sample_permutations: every draw is a bijection of the range") {
  const auto s = sample_permutations(9, 500, 11);
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::vector<std::uint32_t> img(s.image(i).begin(), s.image(i).end());
    std::sort(img.begin(), img.end());
    for (std::uint32_t k = 0; k < img.size(); ++k) REQUIRE(img[k] == k);
  }
}

TEST_CASE("sample_permutations: uniform over the six permutations of three points") {
  const std::size_t M = 60000;
  const auto s = sample_permutations(3, M, 2024);
  std::map<std::vector<std::uint32_t>, std::size_t> freq;
  for (std::size_t i = 0; i < M; ++i) ++freq[{s.image(i).begin(), s.image(i).end()}];
  CHECK(freq.size() == 6);
  for (const auto& [perm, n] : freq) CHECK(std::abs(static_cast<double>(n) / M - 1.0 / 6) <= 0.01);
}

TEST_CASE("sample_permutations over an offline-extended range") {
  SplitMix64 gen(1);
  const auto seq = test::make_sequence(test::random_points(gen, 5), 2);
  const auto s = sample_permutations(seq, 4, 9);
  CHECK(s.domain_size() == 5);
  CHECK(s.first_index() == -1);
  CHECK(s[0].last_index() == 3);
}

TEST_CASE("Permutation rejects non-bijections and maps time indices") {
  CHECK_THROWS_AS(Permutation({0, 0, 1}), DomainError);
  const Permutation pi({2, 0, 1});  // pi(1) = 3, pi(2) = 1, pi(3) = 2
  CHECK(pi(1) == 3);
  CHECK(pi(2) == 1);
  CHECK(pi(3) == 2);
  CHECK(pi.inverse()(3) == 1);
  CHECK(Permutation::identity(4, -1).is_identity());
}

TEST_CASE("permute_with_imputation") {
  const DataSequence seq({{{1.0}, 10.0}, {{2.0}, 20.0}}, {3.0});

  SUBCASE("identity keeps the order and exposes only X_t last") {
    const auto out = permute_with_imputation(seq, Permutation::identity(3), 0.5);
    REQUIRE(out.prefix.size() == 2);
    CHECK(out.prefix[0].y == 10.0);
    CHECK(out.prefix[1].y == 20.0);
    CHECK(out.final_x == Features{3.0});
    CHECK(out.final_source == 2);
  }
  SUBCASE("(3, 1, 2) puts the imputed test point first") {
    const auto out = permute_with_imputation(seq, Permutation({2, 0, 1}), 0.5);
    CHECK(out.prefix[0].x == Features{3.0});
    CHECK(out.prefix[0].y == 0.5);
    CHECK(out.prefix[1].x == Features{1.0});
    CHECK(out.prefix[1].y == 10.0);
    CHECK(out.final_x == Features{2.0});
  }
  SUBCASE("swap on two points") {
    const DataSequence two({{{1.0}, 10.0}}, {2.0});
    const auto out = permute_with_imputation(two, Permutation({1, 0}), -1.0);
    CHECK(out.prefix[0].x == Features{2.0});
    CHECK(out.prefix[0].y == -1.0);
    CHECK(out.final_x == Features{1.0});
  }
  SUBCASE("domain mismatch") {
    CHECK_THROWS_AS(permute_with_imputation(seq, Permutation::identity(4), 0.0), DomainError);
    CHECK_THROWS_AS(permute_with_imputation(seq, Permutation::identity(3, 0), 0.0), DomainError);
  }
}

TEST_CASE("DataSequence validates its points") {
  CHECK_THROWS_AS(DataSequence({{{1.0, 2.0}, 1.0}}, {1.0}), DomainError);
  CHECK_THROWS_AS(DataSequence({{{1.0}, NAN}}, {1.0}), DomainError);
  const auto seq = DataSequence::with_offline({{{0.0}, 1.0}}, {{{1.0}, 2.0}}, {2.0});
  CHECK(seq.t() == 2);
  CHECK(seq.first_index() == 0);
  CHECK(seq.offline().size() == 1);
  CHECK(seq.labeled().size() == 1);
}

TEST_CASE("augmented_quantile: rank semantics") {
  const std::vector<double> v{3, 1, 2};
  CHECK(augmented_quantile(1.0, v) == 3.0);
  const std::vector<double> four{1, 2, 3, 4};
  CHECK(augmented_quantile(6.0 / 4, four).is_pos_infinity());
  CHECK(augmented_quantile(0.5, four) == 2.0);
  CHECK(augmented_quantile(0.3, std::vector<double>{}).is_pos_infinity());
  CHECK_THROWS_AS(augmented_quantile(0.0, four), DomainError);
  CHECK_THROWS_AS(augmented_quantile(-0.1, four), DomainError);
}

TEST_CASE("augmented_quantile: monotone in beta and always an element or +inf") {
  SplitMix64 gen(5);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> v(uniform_below(gen, 8));
    for (auto& x : v) x = static_cast<double>(uniform_below(gen, 5));
    ExtendedReal prev = ExtendedReal::negative_infinity();
    for (double beta = 0.05; beta <= 1.5; beta += 0.05) {
      const auto q = augmented_quantile(beta, v);
      CHECK(q >= prev);
      CHECK((q.is_pos_infinity() || std::find(v.begin(), v.end(), q.value()) != v.end()));
      prev = q;
    }
  }
}

TEST_CASE("weighted_quantile: examples") {
  CHECK(weighted_quantile(1.0, std::vector<double>{5, 1, 3}, std::vector<double>{1, 1, 1}) == 5.0);
  CHECK(weighted_quantile(0.5, std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 2}) == 2.0);
  CHECK(weighted_quantile(0.25, std::vector<double>{7}, std::vector<double>{3}) == 7.0);
  CHECK_THROWS_AS(weighted_quantile(0.5, std::vector<double>{1, 2}, std::vector<double>{0, 0}), DomainError);
}

TEST_CASE("weighted_quantile with equal weights is the empirical quantile") {
  SplitMix64 gen(8);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + uniform_below(gen, 10);
    std::vector<double> v(n);
    for (auto& x : v) x = static_cast<double>(uniform_below(gen, 6));
    const std::vector<double> w(n, 1.0);
    // Dyadic levels keep beta * n exact, so the oracle can use integers.
    const std::size_t m = 1 + uniform_below(gen, 16);
    const double beta = static_cast<double>(m) / 16.0;
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::size_t k = 1;
    while (k * 16 < m * n) ++k;
    CHECK(weighted_quantile(beta, v, w) == sorted[k - 1]);
  }
}

TEST_CASE("IntervalSet normalises, merges and measures") {
  const IntervalSet s({{3, 4}, {0, 1}, {1, 2, false, true}});
  REQUIRE(s.parts().size() == 2);
  CHECK(s.measure() == 3.0);
  CHECK(s.contains(1.0));
  CHECK_FALSE(s.contains(2.5));
  CHECK(IntervalSet::everything().measure().is_pos_infinity());
  CHECK(IntervalSet({{1, 1, true, false}}).empty());
  CHECK(IntervalSet::point(2).measure() == 0.0);
}

TEST_CASE("score sublevel sets are exactly the labels within the bound") {
  const ResidualScore res(column(0));
  const CqrScore cqr(column(1), column(2));
  const std::vector<double> x{0.5, -1.0, 1.5};
  SplitMix64 gen(3);
  for (const LastPointScore* v : {static_cast<const LastPointScore*>(&res), static_cast<const LastPointScore*>(&cqr)}) {
    for (double tau : {-2.0, 0.0, 0.7, 3.0}) {
      for (bool inclusive : {true, false}) {
        const ScoreBound b{tau, inclusive};
        const auto set = v->sublevel(x, b);
        for (int k = 0; k < 200; ++k) {
          const double y = 10.0 * uniform01(gen) - 5.0;
          CHECK(set.contains(y) == b.admits(v->score(x, y)));
        }
        // The ends of the band sit exactly on the bound.
        for (const auto& part : set.parts()) {
          if (std::isfinite(part.lo)) CHECK(set.contains(part.lo) == b.admits(v->score(x, part.lo)));
          if (std::isfinite(part.hi)) CHECK(set.contains(part.hi) == b.admits(v->score(x, part.hi)));
        }
      }
    }
    CHECK(v->sublevel(x, {ExtendedReal::infinity(), true}) == IntervalSet::everything());
    CHECK(v->sublevel(x, {ExtendedReal::negative_infinity(), false}).empty());
  }
}

TEST_CASE("ExtendedReal ordering and printing") {
  CHECK(ExtendedReal(1e300) < ExtendedReal::infinity());
  CHECK(ExtendedReal::negative_infinity() < ExtendedReal(-1e300));
  std::ostringstream os;
  os << ExtendedReal::infinity() << " " << ExtendedReal(2.5);
  CHECK(os.str() == "inf 2.5");
}
