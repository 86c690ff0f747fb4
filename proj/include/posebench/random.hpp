#pragma once

#include <cstdint>
#include <random>

namespace posebench {

/// Portable seeded generator. The raw stream is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the derived distributions below are
/// written out explicitly because the std:: distributions are not portable
/// across standard libraries.
///
///   uniform()  = (next() >> 11) * 2^-53                      in [0, 1)
///   normal()   = Box-Muller cosine branch on two uniforms, u1 mapped to (0, 1]
///   index(n)   = floor(uniform() * n)
class Rng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64";
  static constexpr const char* kDistributions =
      "uniform=(x>>11)*2^-53; normal=box-muller(cos) with u1=1-uniform; index=floor(uniform*n)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace posebench
