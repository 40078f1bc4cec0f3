#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace bp {

// splitmix64. One 64-bit word of state, identical output on every platform,
// which is what the bit-identical-replay contract of the harness needs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Inverse-CDF walk over `probs` (assumed to sum to ~1). The final index
  // absorbs any rounding shortfall.
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Per-case seed: position-based, so corpus order and execution schedule
// cannot leak randomness between cells.
inline std::uint64_t derive_case_seed(std::uint64_t master_seed,
                                      std::string_view cell_id,
                                      std::uint64_t case_index) {
  std::uint64_t s = mix64(master_seed ^ fnv1a64(cell_id));
  return mix64(s ^ (case_index * 0x9E3779B97F4A7C15ULL));
}

}  // namespace bp
