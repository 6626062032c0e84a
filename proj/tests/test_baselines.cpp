#include <doctest.h>

#include <cmath>

#include "alrl/baselines/policies.hpp"
#include "alrl/core/errors.hpp"

using namespace alrl;

namespace {

std::vector<int> indices(const std::vector<MaterialAction>& as) {
  std::vector<int> out;
  for (auto a : as) out.push_back(a.index());
  return out;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("random policy is uniform") {
  RngStream rng(1);
  const int n = 10000;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    const auto a = random_policy(LatentState{0.1, 0.9}, rng);
    REQUIRE(a.index() >= 1);
    REQUIRE(a.index() <= 3);
    ++counts[a.unit()];
  }
  const double se = std::sqrt((1.0 / 3) * (2.0 / 3) / n);
  for (int c : counts) CHECK(std::abs(c / double(n) - 1.0 / 3) < 3 * se);
}

TEST_CASE("random policy ignores the state (two-sample chi-square)") {
  RngStream r1(2), r2(3);
  const int n = 10000;
  double o[2][3] = {};
  for (int i = 0; i < n; ++i) {
    ++o[0][random_policy(LatentState{0, 0}, r1).unit()];
    ++o[1][random_policy(LatentState{1, 0.5}, r2).unit()];
  }
  double chi2 = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double e = (o[0][k] + o[1][k]) / 2;
    for (int g = 0; g < 2; ++g) chi2 += (o[g][k] - e) * (o[g][k] - e) / e;
  }
  CHECK(std::exp(-chi2 / 2) > 0.01);  // 2 x 3 table: 2 degrees of freedom
}

TEST_CASE("heuristic candidates") {
  const MasteryThreshold th;
  CHECK(indices(heuristic_candidates(LatentState{1, 0.5}, th)) == std::vector<int>{2, 3});
  CHECK(indices(heuristic_candidates(LatentState{0.5, 1}, th)) == std::vector<int>{1, 3});
  CHECK(indices(heuristic_candidates(LatentState{0.2, 0.3}, th)) == std::vector<int>{1, 2, 3});
  CHECK(indices(heuristic_candidates(LatentState{1 - 1e-4, 1 - 1e-4}, th)) ==
        std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(MasteryThreshold(0.0), ArgumentError);
}

TEST_CASE("heuristic never picks material 1 once trait 1 is mastered") {
  RngStream rng(4);
  const MasteryThreshold th;
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 3000; ++i) {
    const LatentState s{1 - 1e-4 * rng.uniform(), 0.9 * rng.uniform()};
    const auto a = heuristic_policy(s, th, rng);
    REQUIRE(a.index() != 1);
    ++counts[a.unit()];
  }
  CHECK(counts[1] > 1300);
  CHECK(counts[2] > 1300);
}

}  // TEST_SUITE
