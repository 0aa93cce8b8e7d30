#pragma once

#include <cstdint>
#include <random>

namespace qhyst {

// splitmix64 finalizer; derives independent stream seeds from (seed, stream).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Seedable 64-bit generator with hand-rolled uniform/gaussian draws so a
// seed maps to the same trajectory regardless of the standard library's
// distribution implementations. Copyable: a copy replays identically.
class Rng {
 public:
  Rng() : gen_(0) {}
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Independent sub-stream of a base seed.
  static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
    return Rng(mix_seed(seed, stream_id));
  }

  double uniform();             // [0, 1)
  double gaussian();            // standard normal (Box-Muller)
  std::size_t index(std::size_t n);  // uniform in [0, n), unbiased

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace qhyst
