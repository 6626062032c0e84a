#include <doctest.h>

#include <cmath>
#include <set>

#include "alrl/core/config.hpp"
#include "alrl/core/errors.hpp"
#include "alrl/core/rng.hpp"
#include "alrl/core/types.hpp"

using namespace alrl;

TEST_SUITE("core") {

TEST_CASE("rng: determinism and range") {
  RngStream a(42), b(42);
  const double first = a.uniform();
  const double second = a.uniform();
  CHECK(first != second);

  RngStream c(42);
  for (int i = 0; i < 100; ++i) CHECK(b.next_u64() == c.next_u64());

  RngStream r(7);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("rng: xoshiro256** reference outputs") {
  // State filled from SplitMix64(0); first SplitMix64 output is the
  // published reference value.
  std::uint64_t sm = 0;
  CHECK(splitmix64(sm) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(sm) == 0x6E789E6AA1B965F4ULL);
}

TEST_CASE("rng: substreams are distinct and reproducible") {
  std::set<std::uint64_t> firsts;
  for (int p = 1; p <= 9; ++p) {
    auto s = RngStream::substream(1, static_cast<StreamPurpose>(p));
    firsts.insert(s.next_u64());
    auto again = RngStream::substream(1, static_cast<StreamPurpose>(p));
    auto s2 = RngStream::substream(1, static_cast<StreamPurpose>(p));
    CHECK(again.next_u64() == s2.next_u64());
  }
  CHECK(firsts.size() == 9);
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 2, 4));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(2, 2, 3));
}

TEST_CASE("rng: uniform_index") {
  RngStream r(3);
  CHECK_THROWS_AS(r.uniform_index(0), ArgumentError);
  for (int i = 0; i < 1000; ++i) CHECK(r.uniform_index(3) < 3);
}

TEST_CASE("gaussian: degenerate and errors") {
  RngStream r(1);
  CHECK(gaussian(r, 0.0, 0.0) == 0.0);
  CHECK(gaussian(r, 5.0, 0.0) == 5.0);
  CHECK_THROWS_AS(gaussian(r, 0.0, -0.1), ArgumentError);

  // sigma == 0 consumes draws like sigma > 0.
  RngStream x(9), y(9);
  gaussian(x, 0.0, 0.0);
  gaussian(y, 0.0, 1.0);
  CHECK(x.next_u64() == y.next_u64());
}

TEST_CASE("gaussian: moments at sigma 0.03") {
  RngStream r(2024);
  const int n = 100000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = gaussian(r, 0.0, 0.03);
    sum += g;
    sq += g * g;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 0.0005);
  CHECK(std::abs(sd - 0.03) < 0.002);
}

TEST_CASE("beta_one_b: closed-form values") {
  CHECK(beta_one_b_from_uniform(0.5, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  for (double b : {0.5, 1.0, 3.0, 10.0}) CHECK(beta_one_b_from_uniform(0.0, b) == 0.0);
  RngStream r(1);
  CHECK_THROWS_AS(beta_one_b(r, 0.0), ArgumentError);
  CHECK_THROWS_AS(beta_one_b(r, -1.0), ArgumentError);
}

TEST_CASE("beta_one_b: Monte Carlo mean within 3 SE of 1/(1+b)") {
  for (double b : {1.0, 3.0, 10.0, 30.0}) {
    RngStream r(static_cast<std::uint64_t>(b * 100));
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = beta_one_b(r, b);
      REQUIRE(x >= 0.0);
      REQUIRE(x <= 1.0);
      sum += x;
    }
    // Beta(1, b): mean 1/(1+b), variance b / ((1+b)^2 (2+b)).
    const double mean = 1.0 / (1.0 + b);
    const double se = std::sqrt(b / ((1 + b) * (1 + b) * (2 + b)) / n);
    CAPTURE(b);
    CHECK(std::abs(sum / n - mean) < 3 * se);
  }
}

TEST_CASE("LatentState and MaterialAction contracts") {
  CHECK_THROWS_AS(LatentState(std::vector<double>{}), ArgumentError);
  CHECK_THROWS_AS(LatentState({0.5, 1.2}), ArgumentError);
  CHECK_THROWS_AS(LatentState({-0.1, 0.0}), ArgumentError);
  const auto c = LatentState::clamped({-0.5, 1.5});
  CHECK(c[0] == 0.0);
  CHECK(c[1] == 1.0);
  CHECK(LatentState::zeros(2) == LatentState{0.0, 0.0});
  CHECK(LatentState{1 - 1e-4, 1 - 1e-4}.mastered(1e-3));
  CHECK_FALSE(LatentState{1.0, 0.998}.mastered(1e-3));
  CHECK(mastery_reward(LatentState{1.0, 1.0}, 1e-3) == 0.0);
  CHECK(mastery_reward(LatentState{0.5, 1.0}, 1e-3) == -1.0);

  CHECK_THROWS_AS(MaterialAction(0, 3), ArgumentError);
  CHECK_THROWS_AS(MaterialAction(4, 3), ArgumentError);
  CHECK(MaterialAction(3, 3).unit() == 2);
  CHECK(MaterialAction::from_unit(0, 3).index() == 1);
}

TEST_CASE("config: defaults and round trip") {
  const ExperimentConfig d;
  CHECK(d.gamma == 0.9);
  CHECK(d.alpha == 6e-4);
  CHECK(d.minibatch == 256);
  CHECK(d.q_hidden == std::vector<int>{64, 32});
  CHECK(d.estimator_hidden == std::vector<int>{32});
  CHECK_NOTHROW(d.validate());

  ExperimentConfig c;
  c.alpha = 1.25e-3;
  c.q_hidden = {16, 8, 4};
  c.sigma_sweep = {0.1};
  c.estimator_gated_output = false;
  c.kernel.g2_a3.bump = -20;
  c.seed = 123456789012345ULL;
  CHECK(parse_config(format_config(c)) == c);
}

TEST_CASE("config: parsing") {
  const auto c = parse_config("# comment\n  alpha = 0.001  # trailing\n\nq_hidden = 8, 4\n"
                              "kernel.g1_a1 = 1, 2, 3\nestimator_output = direct\n");
  CHECK(c.alpha == 0.001);
  CHECK(c.q_hidden == std::vector<int>{8, 4});
  CHECK(c.kernel.g1_a1.theta1 == 2.0);
  CHECK_FALSE(c.estimator_gated_output);

  auto key_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string("<none>");
  };
  CHECK(key_of("nope = 1") == "nope");
  CHECK(key_of("alpha = 1\nalpha = 2") == "alpha");
  CHECK(key_of("alpha = x") == "alpha");
  CHECK(key_of("alpha") == "line 1");
  CHECK(key_of("kernel.g1_a1 = 1, 2") == "kernel.g1_a1");
  CHECK(key_of("virtual_noise = maybe") == "virtual_noise");
}

TEST_CASE("config: each out-of-range field has its own error") {
  const std::vector<std::pair<std::string, std::string>> bad = {
      {"dim", "0"},
      {"actions", "0"},
      {"gamma", "1"},
      {"termination_tol", "0"},
      {"max_episode_steps", "0"},
      {"noise_sigma", "-0.1"},
      {"alpha", "0"},
      {"eps_high", "1.5"},
      {"eps_low", "-0.1"},
      {"tau_eps", "0"},
      {"minibatch", "0"},
      {"episodes", "-1"},
      {"q_hidden", ""},
      {"target_sync_interval", "-1"},
      {"adam_beta1", "1"},
      {"adam_beta2", "1"},
      {"adam_epsilon", "0"},
      {"estimator_hidden", "0"},
      {"fit_batch", "0"},
      {"fit_learning_rate", "0"},
      {"fit_epochs", "-1"},
      {"fit_train_fraction", "1"},
      {"eval_learners", "0"},
      {"smoothing_window", "0"},
      {"sigma_sweep", "-0.01"},
      {"sim2_learners", "0"},
      {"virtual_episodes", "-1"},
      {"kernel.g2_a3", "20, -28, 0.6, 0, 30, -0.3"},
  };
  std::set<std::string> messages;
  for (const auto& [key, value] : bad) {
    CAPTURE(key);
    try {
      parse_config(key + " = " + value);
      FAIL("accepted");
    } catch (const ConfigError& e) {
      CHECK(e.key() == key);
      messages.insert(e.what());
    }
  }
  CHECK(messages.size() == bad.size());

  // eps_low above eps_high is rejected too.
  CHECK_THROWS_AS(parse_config("eps_high = 0.2\neps_low = 0.3"), ConfigError);
}

}  // TEST_SUITE
