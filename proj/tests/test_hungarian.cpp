// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "cfmimo/hungarian.hpp"
#include "cfmimo/rng.hpp"

using cfmimo::Assignment;
using cfmimo::RewardMatrix;
using cfmimo::Rng;
using cfmimo::solve_brute_force;
using cfmimo::solve_max;

namespace {

RewardMatrix random_matrix(int n, Rng& rng, double scale = 1.0) {
  RewardMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = scale * rng.uniform();
  return m;
}

RewardMatrix random_int_matrix(int n, Rng& rng, int max_value) {
  RewardMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = rng.uniform_int(max_value + 1);
  return m;
}

bool is_permutation_0n(const std::vector<int>& perm) {
  std::set<int> seen(perm.begin(), perm.end());
  if (seen.size() != perm.size()) return false;
  return *seen.begin() == 0 && *seen.rbegin() == static_cast<int>(perm.size()) - 1;
}

// All optimal permutations of a small matrix, by enumeration.
std::set<std::vector<int>> optimal_set(const RewardMatrix& m) {
  const double best = solve_brute_force(m).value;
  std::vector<int> perm(m.order());
  for (int i = 0; i < m.order(); ++i) perm[i] = i;
  std::set<std::vector<int>> out;
  do {
    double v = 0.0;
    for (int i = 0; i < m.order(); ++i) v += m.at(i, perm[i]);
    if (v == best) out.insert(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

TEST_CASE("single entry matrix") {
  const auto m = RewardMatrix::from_rows({{7.0}});
  const Assignment a = solve_max(m);
  CHECK(a.perm == std::vector<int>{0});
  CHECK(a.value == 7.0);
  const Assignment b = solve_brute_force(m);
  CHECK(b.perm == a.perm);
  CHECK(b.value == a.value);
}

TEST_CASE("diagonal dominance picks the diagonal") {
  const auto m = RewardMatrix::from_rows({{1.0, 0.0}, {0.0, 1.0}});
  const Assignment a = solve_max(m);
  CHECK(a.perm == std::vector<int>{0, 1});
  CHECK(a.value == 2.0);
}

TEST_CASE("3x3 example matches full enumeration") {
  const auto m = RewardMatrix::from_rows({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
  const Assignment oracle = solve_brute_force(m);
  // All six permutations by hand: best is rows -> columns (0,2,1) = 4+5+2.
  CHECK(oracle.perm == std::vector<int>{0, 2, 1});
  CHECK(oracle.value == 11.0);
  const Assignment a = solve_max(m);
  CHECK(a.perm == oracle.perm);
  CHECK(a.value == oracle.value);
}

TEST_CASE("validation names the offending cell") {
  RewardMatrix m(2);
  m.at(1, 0) = -0.5;
  CHECK_THROWS_WITH_AS(m.validate(), doctest::Contains("(1, 0)"), std::invalid_argument);

  RewardMatrix nan_m(2);
  nan_m.at(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(nan_m.validate(), doctest::Contains("(0, 1)"), std::invalid_argument);

  CHECK_THROWS_AS(solve_max(nan_m), std::invalid_argument);
}

TEST_CASE("brute force refuses large orders") {
  RewardMatrix m(11);
  CHECK_THROWS_AS(solve_brute_force(m), std::invalid_argument);
}

TEST_CASE("oracle equivalence on random matrices, sizes 1..8") {
  Rng rng(0xA5A5F00Du);
  for (int n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 200; ++rep) {
      const RewardMatrix m = random_matrix(n, rng);
      const Assignment fast = solve_max(m);
      const Assignment slow = solve_brute_force(m);
      REQUIRE(is_permutation_0n(fast.perm));
      REQUIRE(fast.value == slow.value);
      REQUIRE(fast.perm == slow.perm);
    }
  }
}

TEST_CASE("oracle equivalence under heavy exact ties (integer entries)") {
  Rng rng(0xBEEF5EEDu);
  for (int n = 2; n <= 6; ++n) {
    for (int rep = 0; rep < 300; ++rep) {
      const RewardMatrix m = random_int_matrix(n, rng, 3);
      const Assignment fast = solve_max(m);
      const Assignment slow = solve_brute_force(m);
      REQUIRE(fast.value == slow.value);
      REQUIRE(fast.perm == slow.perm);
    }
  }
}

TEST_CASE("constant matrix resolves to the identity permutation") {
  RewardMatrix m(4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m.at(i, j) = 2.5;
  const Assignment a = solve_max(m);
  const Assignment b = solve_brute_force(m);
  CHECK(a.perm == std::vector<int>{0, 1, 2, 3});
  CHECK(b.perm == a.perm);
}

TEST_CASE("row shift moves the value by the shift and keeps the optimal set") {
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 2 + rng.uniform_int(4);
    RewardMatrix m = random_matrix(n, rng);
    const auto before_set = optimal_set(m);
    const double before_value = solve_max(m).value;

    const int row = rng.uniform_int(n);
    const double shift = rng.uniform();
    RewardMatrix shifted = m;
    for (int j = 0; j < n; ++j) shifted.at(row, j) += shift;

    const Assignment after = solve_max(shifted);
    CHECK(after.value == doctest::Approx(before_value + shift).epsilon(1e-12));
    CHECK(optimal_set(shifted) == before_set);
    CHECK(before_set.count(after.perm) == 1);
  }
}

TEST_CASE("positive rescaling preserves the chosen permutation") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const RewardMatrix m = random_matrix(5, rng, 1e13);
    CHECK(solve_max(m.scaled_by(1e-12)).perm == solve_max(m).perm);
  }
}

TEST_CASE("determinism: repeated solves agree") {
  Rng rng(99);
  const RewardMatrix m = random_matrix(8, rng);
  const Assignment a = solve_max(m);
  const Assignment b = solve_max(m);
  CHECK(a.perm == b.perm);
  CHECK(a.value == b.value);
}
