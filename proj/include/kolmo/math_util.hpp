#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace kolmo {

// Kernel value split as mantissa * 2^log2_scale.  The lattice kernels carry
// factors 2^{z2-z1} whose exponents grow linearly in the window size; storing
// the power-of-two part separately keeps compositions in a sane dynamic range
// (diagonal conjugation by 2^z cancels the scales exactly).
struct kernel_value {
  double mantissa = 0.0;
  long log2_scale = 0;

  double value() const {
    if (mantissa == 0.0) return 0.0;
    if (log2_scale > 4000) return mantissa * std::numeric_limits<double>::infinity();
    if (log2_scale < -4000) return 0.0;
    return std::ldexp(mantissa, static_cast<int>(log2_scale));
  }
};

inline double pow2d(long e) {
  if (e > 4000) return std::numeric_limits<double>::infinity();
  if (e < -4000) return 0.0;
  return std::ldexp(1.0, static_cast<int>(e));
}

// x! as a double; exact up to 170!, lgamma beyond (never needed below ~1e300).
inline double factorial(long x) {
  static const auto table = [] {
    std::array<double, 171> t{};
    t[0] = 1.0;
    for (int i = 1; i <= 170; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  if (x < 0) return 0.0;
  if (x <= 170) return table[static_cast<std::size_t>(x)];
  return std::exp(std::lgamma(static_cast<double>(x) + 1.0));
}

// Generalized binomial C(a, k) = a(a-1)...(a-k+1)/k! for integer a of either
// sign; zero for k < 0.  Falling-factorial product, so negative and small
// positive upper arguments come out exact where they are integers.
inline double binom(long a, long k) {
  if (k < 0) return 0.0;
  if (k == 0) return 1.0;
  if (a >= 0 && k > a) return 0.0;
  double num = 1.0;
  for (long i = 0; i < k; ++i) num *= static_cast<double>(a - i);
  return num / factorial(k);
}

// t^d / d! built incrementally; avoids overflowing t^d for large d.
inline double pow_over_factorial(double t, long d) {
  if (d < 0) return 0.0;
  double acc = 1.0;
  for (long i = 1; i <= d; ++i) acc *= t / static_cast<double>(i);
  return acc;
}

}  // namespace kolmo
