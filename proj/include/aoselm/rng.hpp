#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aoselm/numerics.hpp"

namespace aoselm {

/// Seeded random stream with platform-independent output.
///
/// The engine is std::mt19937_64, whose output sequence the standard pins down.
/// The standard distributions are implementation defined, so the real-valued
/// conversions are done here: uniform draws take the top 53 bits of one engine
/// output, normal draws use the Marsaglia polar method on those uniforms.
///
/// A stream is single-owner; share it across threads only with external locking.
class RngStream {
public:
  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform01();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Standard normal.
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Independent child stream, deterministic in (this stream's state, tag).
  RngStream fork(std::uint64_t tag);

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class RandomScheme { Uniform, Normal };

/// rows x cols matrix with i.i.d. entries: Uniform -> U[-1, 1), Normal -> N(0, 1).
DenseMatrix random_matrix(RngStream& rng, Index rows, Index cols, RandomScheme scheme);

/// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> random_permutation(RngStream& rng, std::size_t n);

}  // namespace aoselm
