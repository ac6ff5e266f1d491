#include "latentrank/rng.hpp"

namespace latentrank {

namespace {

using u128 = uint128_t;

constexpr u128 kMultiplier =
    (static_cast<u128>(0x2360ED051FC65DA4ULL) << 64) | 0x4385DF649FCCF645ULL;

constexpr std::uint64_t kStreamSalt = 0x6A09E667F3BCC909ULL;

std::uint64_t rotr64(std::uint64_t value, unsigned rot) {
  return (value >> rot) | (value << ((-rot) & 63U));
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = seed;
  std::uint64_t h = splitmix64(s);
  s = h ^ a;
  h = splitmix64(s);
  s = h ^ b;
  return splitmix64(s);
}

RngStream::RngStream(std::uint64_t seed, std::uint32_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t stream_state = static_cast<std::uint64_t>(stream_id) ^ kStreamSalt;
  const std::uint64_t stream_mix = splitmix64(stream_state);
  increment_ = ((static_cast<u128>(stream_mix) << 64) | stream_id) << 1U | 1U;

  std::uint64_t seed_state = seed ^ stream_mix;
  const std::uint64_t hi = splitmix64(seed_state);
  const std::uint64_t lo = splitmix64(seed_state);

  state_ = 0;
  step();
  state_ += (static_cast<u128>(hi) << 64) | lo;
  step();
}

void RngStream::step() { state_ = state_ * kMultiplier + increment_; }

std::uint64_t RngStream::next_u64() {
  step();
  const auto hi = static_cast<std::uint64_t>(state_ >> 64);
  const auto lo = static_cast<std::uint64_t>(state_);
  return rotr64(hi ^ lo, static_cast<unsigned>(state_ >> 122));
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace latentrank
