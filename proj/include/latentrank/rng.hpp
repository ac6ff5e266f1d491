#pragma once

#include <cstdint>
#include <limits>

namespace latentrank {

__extension__ typedef unsigned __int128 uint128_t;

/// One step of the SplitMix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministically mixes a base seed with two indices. Used to give every
/// simulation replicate its own seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

/// Seedable random stream: PCG XSL-RR 128/64.
///
/// Stream split rule: the 128-bit increment is built from
/// (splitmix64(stream_id), stream_id) and forced odd, so every stream id
/// selects a distinct LCG sequence. The starting state is drawn from a
/// SplitMix64 sequence seeded with `seed ^ mix(stream_id)`, so streams that
/// share a seed also start at unrelated positions. Only integer arithmetic is
/// involved, so the raw sequence is bit-identical on every platform.
///
/// A stream has a single owner; it is not synchronised.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint32_t stream_id);

  std::uint64_t next_u64();
  std::uint64_t operator()() { return next_u64(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();

  std::uint64_t seed() const { return seed_; }
  std::uint32_t stream_id() const { return stream_id_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  void step();

  uint128_t state_ = 0;
  uint128_t increment_ = 1;
  std::uint64_t seed_;
  std::uint32_t stream_id_;
};

}  // namespace latentrank
