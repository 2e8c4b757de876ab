#include "iotsim/random.hpp"

#include <cmath>
#include <limits>

namespace iotsim {

std::mt19937_64& RandomStream::engine() {
  if (!engine_) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                      static_cast<std::uint32_t>(stream_),
                      static_cast<std::uint32_t>(stream_ >> 32), 0x10757u};
    engine_ = std::make_unique<std::mt19937_64>(seq);
  }
  return *engine_;
}

std::uint64_t RandomStream::next_u64() { return engine()(); }

double RandomStream::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) {
  if (lo == hi) return lo;
  // 53-bit grid over [0, 1] inclusive so both ends are reachable.
  const double u = static_cast<double>(next_u64() >> 11) / static_cast<double>((1ULL << 53) - 1);
  return lo + (hi - lo) * u;
}

std::size_t RandomStream::index(std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = next_u64();
    if (r >= threshold) return static_cast<std::size_t>(r % bound);
  }
}

bool RandomStream::bernoulli(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return uniform01() < p;
}

}  // namespace iotsim
