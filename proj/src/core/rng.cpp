#include "alrl/core/rng.hpp"

#include <cmath>
#include <numbers>

#include "alrl/core/errors.hpp"

namespace alrl {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) noexcept : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& word : s_) word = splitmix64(sm);
}

RngStream RngStream::substream(std::uint64_t master_seed, StreamPurpose purpose,
                               std::uint64_t index) noexcept {
  std::uint64_t mix = master_seed;
  std::uint64_t derived = splitmix64(mix);
  derived ^= static_cast<std::uint64_t>(purpose) * 0xD1B54A32D192ED03ULL;
  derived ^= (index + 1) * 0x8CB92BA72F3D8DD7ULL;
  std::uint64_t sm = derived;
  return RngStream(splitmix64(sm));
}

std::uint64_t RngStream::next_u64() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::size_t RngStream::uniform_index(std::size_t n) {
  if (n == 0) throw ArgumentError("uniform_index: n must be positive");
  const auto idx = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return idx < n ? idx : n - 1;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index) noexcept {
  std::uint64_t sm = master_seed ^ (tag * 0xA24BAED4963EE407ULL);
  sm = splitmix64(sm) ^ (index * 0x9FB21C651E98DF25ULL);
  return splitmix64(sm);
}

double uniform(RngStream& rng) noexcept { return rng.uniform(); }

double gaussian(RngStream& rng, double mu, double sigma) {
  if (!(sigma >= 0.0)) throw ArgumentError("gaussian: sigma must be >= 0");
  const double u1 = 1.0 - rng.uniform();  // (0, 1]
  const double u2 = rng.uniform();
  if (sigma == 0.0) return mu;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

double beta_one_b_from_uniform(double u, double b) {
  if (!(b > 0.0)) throw ArgumentError("beta_one_b: b must be > 0");
  return 1.0 - std::pow(1.0 - u, 1.0 / b);
}

double beta_one_b(RngStream& rng, double b) {
  if (!(b > 0.0)) throw ArgumentError("beta_one_b: b must be > 0");
  return beta_one_b_from_uniform(rng.uniform(), b);
}

}  // namespace alrl
