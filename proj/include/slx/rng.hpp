#pragma once

// Deterministic random streams. The generator is SplitMix64: a counter-based
// 64-bit mixer, so a stream is a pure function of (seed, counter) and any
// sample index can be generated independently of the others. Gaussian and
// exponential variates are deterministic transforms of the uniforms
// (Box-Muller, inverse log), never OS entropy, so identical seeds give
// bitwise-identical output on a given platform.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace slx {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Folds tag characters and extra words into a sub-seed. Used to carve
// independent named streams out of one master seed (stage name + indices),
// so parallel and serial generation agree.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag,
                                 std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(master ^ 0x51a7bbdc0b1e4e5fULL);
  for (char c : tag) h = splitmix64(h ^ static_cast<std::uint64_t>(c));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  // Uniform in [0, 1): 53 random mantissa bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1]; safe as a log argument.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unit-rate exponential via inverse transform (branch-free).
  double exponential() { return -std::log(uniform_pos()); }

  // Standard normal via Box-Muller; the spare variate is cached so a pair of
  // uniforms is consumed every second call.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace slx
