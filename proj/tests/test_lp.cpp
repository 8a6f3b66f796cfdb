#include <catch2/catch_amalgamated.hpp>

#include "binomix/lp.hpp"

using namespace binomix;

TEST_CASE("simplex solves a textbook problem") {
  // min -3x - 5y st x + s1 = 4, 2y + s2 = 12, 3x + 2y + s3 = 18.
  std::vector<std::vector<double>> A = {
      {1, 0, 1, 0, 0}, {0, 2, 0, 1, 0}, {3, 2, 0, 0, 1}};
  auto res = solve_lp(A, {4, 12, 18}, {-3, -5, 0, 0, 0});
  REQUIRE(res.feasible);
  REQUIRE(res.bounded);
  CHECK(res.objective == Catch::Approx(-36.0));
  CHECK(res.x[0] == Catch::Approx(2.0));
  CHECK(res.x[1] == Catch::Approx(6.0));
}

TEST_CASE("simplex detects infeasibility") {
  // x1 + x2 = 1 and x1 + x2 = 3 cannot both hold.
  std::vector<std::vector<double>> A = {{1, 1}, {1, 1}};
  auto res = solve_lp(A, {1, 3}, {1, 1});
  CHECK(!res.feasible);
}

TEST_CASE("simplex detects unboundedness") {
  // min -x st x - y = 0: x can grow without bound.
  std::vector<std::vector<double>> A = {{1, -1}};
  auto res = solve_lp(A, {0}, {-1, 0});
  REQUIRE(res.feasible);
  CHECK(!res.bounded);
}

TEST_CASE("simplex handles degenerate equality starts") {
  // Transportation-style problem with redundant constraint.
  std::vector<std::vector<double>> A = {
      {1, 1, 0, 0}, {0, 0, 1, 1}, {1, 0, 1, 0}, {0, 1, 0, 1}};
  auto res = solve_lp(A, {1, 1, 1, 1}, {1, 2, 3, 1});
  REQUIRE(res.feasible);
  CHECK(res.objective == Catch::Approx(2.0));
}

TEST_CASE("L1 fit via split residuals") {
  // min |w1 + 2 w2 - 1.0| + |w1 - w2 - 0.2| st w1 + w2 = 1 ->
  // choose w = (0.733.., 0.266..) zeroing the second residual is not
  // optimal; LP finds the minimizing corner.
  // Variables: w1 w2 u1 v1 u2 v2.
  std::vector<std::vector<double>> A = {
      {1, 2, -1, 1, 0, 0}, {1, -1, 0, 0, -1, 1}, {1, 1, 0, 0, 0, 0}};
  auto res = solve_lp(A, {1.0, 0.2, 1.0}, {0, 0, 1, 1, 1, 1});
  REQUIRE(res.feasible);
  // Brute force over w1 in [0,1].
  double best = 1e9;
  for (int i = 0; i <= 100000; ++i) {
    const double w1 = i / 100000.0, w2 = 1 - w1;
    best = std::min(best, std::abs(w1 + 2 * w2 - 1.0) +
                              std::abs(w1 - w2 - 0.2));
  }
  CHECK(res.objective == Catch::Approx(best).margin(1e-5));
}
