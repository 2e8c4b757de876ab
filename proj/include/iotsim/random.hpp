#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>

namespace iotsim {

/// Deterministic per-entity random stream. All streams of a run share the run
/// seed and differ by a stable stream index, so the values an entity draws do
/// not depend on how events of other entities interleave. The engine is created
/// on first use; entities that never draw pay nothing.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  RandomStream(const RandomStream& other) : seed_(other.seed_), stream_(other.stream_) {
    if (other.engine_) engine_ = std::make_unique<std::mt19937_64>(*other.engine_);
  }
  RandomStream& operator=(const RandomStream& other) {
    if (this != &other) *this = RandomStream(other);
    return *this;
  }
  RandomStream(RandomStream&&) noexcept = default;
  RandomStream& operator=(RandomStream&&) noexcept = default;

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform01();

  /// Uniform in [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi);

  /// Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n);

  /// True with probability p (p <= 0 never, p >= 1 always, no draw in either case).
  bool bernoulli(double p);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::mt19937_64& engine();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::unique_ptr<std::mt19937_64> engine_;
};

}  // namespace iotsim
