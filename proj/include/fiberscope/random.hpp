#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace fiberscope {

// All randomness in the project flows through this generator so that instances are
// reproducible across implementations:
//   engine  : std::mt19937_64 (standard MT19937-64 constants, seeded with the u64 seed)
//   uniform : (draw >> 11) * 2^-53, giving a double in [0, 1)
//   signed  : 2 * uniform - 1, in [-1, 1)
//   complex : real part drawn first, then imaginary part
// The std distributions are deliberately not used; their output is implementation defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double symmetric() { return 2.0 * uniform() - 1.0; }

  std::complex<double> complex_symmetric() {
    const double re = symmetric();
    const double im = symmetric();
    return {re, im};
  }

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) { return bound == 0 ? 0 : next_u64() % bound; }

 private:
  std::mt19937_64 engine_;
};

// SplitMix64 finalizer, used to derive independent child seeds from a run seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace fiberscope
