#ifndef FPOIS_RNG_HPP
#define FPOIS_RNG_HPP

#include <cmath>
#include <cstdint>

namespace fpois {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so replicates are reproducible and can run on any
// number of threads without shared state. Mixing is splitmix64.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(mix(mix(seed ^ 0x7a11ce50u) ^ mix(stream ^ 0x5eed0123456789abu))) {}

  std::uint64_t word(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * 0x9e3779b97f4a7c15u);
  }

  // uniform on [0,1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(word(counter) >> 11) * 0x1.0p-53;
  }

  // standard normal via Box-Muller; one value per counter
  double normal(std::uint64_t counter) const {
    const std::uint64_t w1 = word(2 * counter);
    const std::uint64_t w2 = word(2 * counter + 1);
    const double u1 = (static_cast<double>(w1 >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15u;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9u;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebu;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
};

}  // namespace fpois

#endif
