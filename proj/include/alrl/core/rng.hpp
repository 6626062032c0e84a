#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace alrl {

/// Independent random substreams spawned from one master seed. The numeric
/// values are part of the reproducibility contract; never renumber them.
enum class StreamPurpose : std::uint64_t {
  kEnvironment = 1,
  kObservation = 2,
  kAgentInit = 3,
  kExploration = 4,
  kReplay = 5,
  kEstimatorSplit = 6,
  kEstimatorInit = 7,
  kEvaluation = 8,
  kBaseline = 9,
};

/// SplitMix64 (Steele, Lea, Flood 2014). Used for seeding and stream derivation.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Deterministic pseudorandom stream: xoshiro256** 1.0 (Blackman & Vigna),
/// state filled from SplitMix64(seed). Integer outputs are identical on every
/// platform.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) noexcept;

  /// Stream for one purpose derived from a master seed.
  static RngStream substream(std::uint64_t master_seed, StreamPurpose purpose,
                             std::uint64_t index = 0) noexcept;

  std::uint64_t next_u64() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;

  /// Uniform integer on [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  std::uint64_t seed() const noexcept { return seed_; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

/// Seed for an independent job (sweep point, replicate) of an experiment.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index = 0) noexcept;

double uniform(RngStream& rng) noexcept;

/// N(mu, sigma^2) via Box-Muller; always consumes two uniforms. sigma == 0
/// returns mu exactly.
double gaussian(RngStream& rng, double mu, double sigma);

/// Inverse CDF of Beta(1, b): 1 - (1 - u)^(1/b).
double beta_one_b_from_uniform(double u, double b);

/// One Beta(1, b) draw by inverse transform of a single uniform.
double beta_one_b(RngStream& rng, double b);

}  // namespace alrl
