#pragma once

#include <cstdint>
#include <random>

#include "oja/types.hpp"

namespace oja {

/// Reproducible random stream addressed by (seed, stream).
///
/// Distinct stream ids on the same seed yield statistically independent
/// sequences, which lets parallel workers own disjoint streams without any
/// coordination.  The mapping (seed, stream) -> engine state is fixed for the
/// life of the project so that archived run outputs stay reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  /// Standard normal draw.
  Scalar gaussian();

  /// Uniform draw on the half-open interval (0, 1]; never returns 0.
  Scalar uniform01();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<Scalar> normal_{0.0, 1.0};
  std::uniform_real_distribution<Scalar> uniform_{0.0, 1.0};
};

/// Matrix with independent standard normal entries, filled row by row so the
/// draw order is part of the reproducibility contract.
Matrix random_gaussian(Index rows, Index cols, RngStream& rng);

}  // namespace oja
