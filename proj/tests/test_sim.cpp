#include <doctest.h>

#include <cmath>

#include "alrl/core/config.hpp"
#include "alrl/core/errors.hpp"
#include "alrl/sim/learner_env.hpp"

using namespace alrl;

namespace {

const KernelParams kDefault{};

LearnerEnv make_env(std::uint64_t seed, double sigma = 0.0) {
  return LearnerEnv::from_config(ExperimentConfig{}, seed, sigma);
}

// Oracle for E[min(X, c)], X ~ Beta(1, b): integral of the survival
// function (1 - x)^b from 0 to c.
double capped_mean(double b, double c) { return (1.0 - std::pow(1.0 - c, b + 1.0)) / (b + 1.0); }

// E[min(X, c)^2] = integral of 2x (1 - x)^b from 0 to c.
double capped_second_moment(double b, double c) {
  const double q = 1.0 - c;
  // 2 * [ (1 - q^{b+1})/(b+1) - (1 - q^{b+2})/(b+2) ]
  return 2.0 * ((1.0 - std::pow(q, b + 1)) / (b + 1) - (1.0 - std::pow(q, b + 2)) / (b + 2));
}

}  // namespace

TEST_SUITE("learner-sim") {

TEST_CASE("g1 and g2 examples") {
  const MaterialAction a1(1, 3), a2(2, 3), a3(3, 3);
  CHECK(eval_g1(kDefault, LatentState{0, 0}, a1) == 3.0);
  CHECK(eval_g1(kDefault, LatentState{1, 1}, a1) == doctest::Approx(10.8).epsilon(1e-14));
  CHECK(eval_g1(kDefault, LatentState{0.5, 0.5}, a3) == doctest::Approx(22.3).epsilon(1e-14));
  CHECK_THROWS_AS(eval_g1(kDefault, LatentState{0, 0}, a2), ArgumentError);

  CHECK(eval_g2(kDefault, 0.0, LatentState{0, 0}, a2) == 10.0);
  CHECK(eval_g2(kDefault, 0.0, LatentState{0.6, 0.5}, a3) == doctest::Approx(18.2).epsilon(1e-14));
  CHECK(eval_g2(kDefault, 1.0, LatentState{0, 0}, a3) == doctest::Approx(19.7).epsilon(1e-14));
  CHECK(eval_g2(kDefault, 0.7, LatentState{0, 0}, a2) == 10.0);  // delta1 ignored
  CHECK_THROWS_AS(eval_g2(kDefault, 0.0, LatentState{0, 0}, a1), ArgumentError);
}

TEST_CASE("kernel positivity grid scan") {
  double min_g1_a1 = 1e9;
  LatentState argmin;
  double min_all = 1e9;
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const LatentState s{i / 100.0, j / 100.0};
      const double g = eval_g1(kDefault, s, MaterialAction(1, 3));
      if (g < min_g1_a1) {
        min_g1_a1 = g;
        argmin = s;
      }
      min_all = std::min({min_all, g, eval_g1(kDefault, s, MaterialAction(3, 3)),
                          eval_g2(kDefault, 0, s, MaterialAction(2, 3))});
      for (int k = 0; k <= 100; ++k) {
        min_all = std::min(min_all, eval_g2(kDefault, k / 100.0, s, MaterialAction(3, 3)));
      }
    }
  }
  CHECK(min_g1_a1 == doctest::Approx(2.8).epsilon(1e-12));
  CHECK(argmin == LatentState{0, 1});
  CHECK(min_all > 0.0);
}

TEST_CASE("step from inside the mastery band terminates with reward 0") {
  for (int a = 1; a <= 3; ++a) {
    auto env = make_env(static_cast<std::uint64_t>(a));
    env.set_true_state(LatentState{1 - 1e-4, 1 - 1e-4});
    const auto r = env.step_true(MaterialAction(a, 3));
    CHECK(r.terminal);
    CHECK(r.reward == 0.0);
    CHECK_THROWS_AS(env.step_true(MaterialAction(a, 3)), StateError);
  }
}

TEST_CASE("step cap is enforced") {
  LearnerEnv::Options opts;
  opts.max_steps = 2;
  LearnerEnv env(opts, RngStream(1), RngStream(2));
  env.reset();
  env.step_true(MaterialAction(2, 3));
  env.step_true(MaterialAction(2, 3));
  CHECK_THROWS_AS(env.step_true(MaterialAction(2, 3)), StateError);
  env.reset();
  CHECK(env.true_state() == LatentState{0, 0});
  CHECK(env.step_count() == 0);
}

TEST_CASE("no retrogression, action selectivity, reward coding over 1e4 random steps") {
  auto env = make_env(77);
  RngStream pick(78);
  int terminals = 0;
  for (int i = 0; i < 10000; ++i) {
    const LatentState s{pick.uniform(), pick.uniform()};
    env.set_true_state(s);
    const int a = 1 + static_cast<int>(pick.uniform_index(3));
    const auto r = env.step_true(MaterialAction(a, 3));
    for (std::size_t d = 0; d < 2; ++d) {
      REQUIRE(r.next_state[d] >= s[d]);
      REQUIRE(r.next_state[d] <= 1.0);
    }
    if (a == 1) REQUIRE(r.next_state[1] == s[1]);
    if (a == 2) REQUIRE(r.next_state[0] == s[0]);
    REQUIRE((r.reward == 0.0 || r.reward == -1.0));
    REQUIRE((r.reward == 0.0) == r.terminal);
    REQUIRE(r.terminal == (std::max(1 - r.next_state[0], 1 - r.next_state[1]) < 1e-3));
    terminals += r.terminal;
  }
  CHECK(terminals > 0);
}

TEST_CASE("increment means match the capped Beta closed form") {
  // From [0,0] with material 1 the cap is inactive: mean 1/(1+3) = 0.25.
  const std::vector<std::pair<LatentState, int>> grid = {
      {{0.0, 0.0}, 1}, {{0.5, 0.2}, 1}, {{0.9, 0.9}, 1},
      {{0.0, 0.0}, 2}, {{0.3, 0.6}, 2}, {{0.9, 0.95}, 2},
      {{0.0, 0.0}, 3}, {{0.6, 0.5}, 3}, {{0.95, 0.4}, 3},
  };
  const int n = 100000;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const auto& [s, a] = grid[gi];
    auto env = make_env(1000 + gi);
    double sum1 = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      env.set_true_state(s);
      const auto r = env.step_true(MaterialAction(a, 3));
      sum1 += r.next_state[0] - s[0];
      sum2 += r.next_state[1] - s[1];
    }
    CAPTURE(gi);
    if (a != 2) {
      const double b = eval_g1(kDefault, s, MaterialAction(a, 3));
      const double c = 1 - s[0];
      const double m = capped_mean(b, c);
      const double se = std::sqrt((capped_second_moment(b, c) - m * m) / n);
      CHECK(std::abs(sum1 / n - m) < 3 * se);
      if (gi == 0) CHECK(m == doctest::Approx(0.25).epsilon(1e-14));
    }
    if (a == 2) {
      const double b = eval_g2(kDefault, 0.0, s, MaterialAction(2, 3));
      const double c = 1 - s[1];
      const double m = capped_mean(b, c);
      const double se = std::sqrt((capped_second_moment(b, c) - m * m) / n);
      CHECK(std::abs(sum2 / n - m) < 3 * se);
    }
  }
}

TEST_CASE("material 3 trait-2 mean averages over the same-step trait-1 draw") {
  // Oracle: numerical integration over delta1 ~ min(Beta(1, g1), 1 - theta1).
  const LatentState s{0.6, 0.5};
  const MaterialAction a3(3, 3);
  const double b1 = eval_g1(kDefault, s, a3);
  const double c1 = 1 - s[0], c2 = 1 - s[1];
  // P(delta1 = c1) = (1 - c1)^b1; continuous part density b1 (1 - x)^(b1 - 1) on [0, c1).
  double expected = std::pow(1 - c1, b1) * capped_mean(eval_g2(kDefault, c1, s, a3), c2);
  const int steps = 20000;
  for (int k = 0; k < steps; ++k) {
    const double x = (k + 0.5) * c1 / steps;
    const double dens = b1 * std::pow(1 - x, b1 - 1);
    expected += dens * capped_mean(eval_g2(kDefault, x, s, a3), c2) * c1 / steps;
  }
  auto env = make_env(4242);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    env.set_true_state(s);
    const double d = env.step_true(a3).next_state[1] - s[1];
    sum += d;
    sq += d * d;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(mean - expected) < 3 * se);
}

TEST_CASE("observe") {
  auto quiet = make_env(5, 0.0);
  quiet.set_true_state(LatentState{0.3, 0.8});
  CHECK(quiet.observe() == LatentState{0.3, 0.8});

  auto noisy = make_env(6, 0.03);
  noisy.set_true_state(LatentState{0.5, 0.5});
  const int n = 100000;
  double s[2] = {0, 0}, q[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    const auto o = noisy.observe();
    for (int d = 0; d < 2; ++d) {
      s[d] += o[d];
      q[d] += o[d] * o[d];
    }
  }
  for (int d = 0; d < 2; ++d) {
    const double m = s[d] / n;
    CHECK(std::abs(std::sqrt(q[d] / n - m * m) - 0.03) < 0.002);
  }

  auto edge = make_env(7, 0.2);
  edge.set_true_state(LatentState{1, 1});
  for (int i = 0; i < 1000; ++i) {
    const auto o = edge.observe();
    REQUIRE(o[0] <= 1.0);
    REQUIRE(o[1] <= 1.0);
  }
}

TEST_CASE("m2pl_prob") {
  CHECK(m2pl_prob(std::vector<double>{0.3, 0.9}, std::vector<double>{0, 0}, 0.0) == 0.5);
  CHECK(m2pl_prob(std::vector<double>{1, 1}, std::vector<double>{1, 1}, -2.0) == 0.5);
  CHECK_THROWS_AS(m2pl_prob(std::vector<double>{1, 1}, std::vector<double>{-1, 1}, 0.0),
                  ArgumentError);
  CHECK_THROWS_AS(m2pl_prob(std::vector<double>{1}, std::vector<double>{1, 1}, 0.0),
                  ArgumentError);
  const double big = m2pl_prob(std::vector<double>{1}, std::vector<double>{1000}, 0.0);
  const double small = m2pl_prob(std::vector<double>{1}, std::vector<double>{1000}, -1700.0);  // exp(-700)
  CHECK(big == 1.0);
  CHECK(small > 0.0);
  CHECK(std::isfinite(small));
  const std::vector<double> a{0.8, 1.7};
  double prev = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double p = m2pl_prob(std::vector<double>{i / 20.0, 0.4}, a, -1.0);
    CHECK(p >= prev);
    prev = p;
  }
}

TEST_CASE("same seed gives the same trajectory") {
  auto a = make_env(99, 0.02), b = make_env(99, 0.02);
  a.reset();
  b.reset();
  for (int t = 0; t < 30 && !a.terminal(); ++t) {
    const MaterialAction m(1 + t % 3, 3);
    CHECK(a.observe() == b.observe());
    CHECK(a.step(m).next_state == b.step(m).next_state);
  }
}

}  // TEST_SUITE
