#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace tde {

// SplitMix64 finalizer, used to derive decorrelated sub-stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Mix a master seed with up to two stream tags. Every consumer of randomness
// gets its own derived stream, so adding or removing a consumer never shifts
// the draws seen by the others.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
  return splitmix64(master ^ splitmix64(tag_a ^ 0xa0761d6478bd642full) ^
                    splitmix64(tag_b ^ 0xe7037ed1a0b428dbull));
}

// mt19937_64 engine with hand-rolled distributions. std:: distributions are
// implementation-defined, which would break byte-identical reruns.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // uniform on [0,1)
  double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Box-Muller pair of independent standard normals.
  void normal_pair(double& a, double& b) {
    const double u1 = 1.0 - uniform01();  // (0,1], keeps log finite
    const double u2 = uniform01();
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    a = rad * std::cos(ang);
    b = rad * std::sin(ang);
  }

  // Circularly-symmetric complex Gaussian with total variance sigma2
  // (variance sigma2/2 per real and imaginary part).
  std::complex<double> complex_normal(double sigma2) {
    double a, b;
    normal_pair(a, b);
    const double s = std::sqrt(0.5 * sigma2);
    return {s * a, s * b};
  }

  // Random sign, +1 or -1 with equal probability.
  double sign() { return (eng_() >> 63) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace tde
