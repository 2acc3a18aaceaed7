#include "oja/rng.hpp"

namespace oja {
namespace {

// splitmix64 finalizer; used only to spread (seed, stream) pairs over the
// 64-bit engine-seed space.
std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_seed_and_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = stream;
  const std::uint64_t b = splitmix64(t);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(mix_seed_and_stream(seed, stream)) {}

Scalar RngStream::gaussian() { return normal_(engine_); }

Scalar RngStream::uniform01() {
  // uniform_real_distribution covers [0, 1); flip it to (0, 1].
  return 1.0 - uniform_(engine_);
}

Matrix random_gaussian(Index rows, Index cols, RngStream& rng) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("random_gaussian: dimensions must be positive");
  }
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.gaussian();
    }
  }
  return m;
}

}  // namespace oja
