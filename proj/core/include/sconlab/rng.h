#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "sconlab/numerics.h"

namespace sconlab {

/// Philox4x32 with 10 rounds (Salmon et al., Random123). Pure function of
/// (counter, key).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                           std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer, used to fold seeds and tags into Philox keys.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit FNV-1a hash of a tag string.
std::uint64_t hash_tag(std::string_view tag);

/// Key for all streams belonging to one (master seed, tag) pair.
std::uint64_t derive_key(std::uint64_t master_seed, std::string_view tag);

/// A sequential view over the Philox counter space for a fixed
/// (key, stream index). Block b of stream s is philox(ctr = {b_lo, b_hi,
/// s_lo, s_hi}, key). Two streams with different (key, index) never share
/// a block, so trajectories draw from disjoint sequences regardless of the
/// order in which they are simulated.
class RngStream {
 public:
  RngStream(std::uint64_t key, std::uint64_t stream_index);

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal by the Box–Muller transform: each pair (u1, u2) of
  /// uniforms gives r = sqrt(-2 log(1 - u1)) and the two outputs
  /// r cos(2 pi u2), r sin(2 pi u2), returned in that order.
  double normal();

  /// Fills `out` with independent standard normals.
  void fill_normal(Eigen::Ref<Vector> out);

  std::uint64_t key() const { return key_; }
  std::uint64_t stream_index() const { return index_; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace sconlab
