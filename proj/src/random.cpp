#include "posebench/random.hpp"

#include <cmath>
#include <numbers>

namespace posebench {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1], keeps log finite
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) return 0;
  const auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

}  // namespace posebench
