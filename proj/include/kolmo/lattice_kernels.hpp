#pragma once

// Transition kernels of the geometric(1/2) down-jump walk and their
// deformations.  Conventions used throughout:
//
//   Q(x,y)       = 2^{y-x} 1{x>y}                       one-step kernel
//   Q^n(x,y)     = 2^{y-x} C(x-y-1, n-1) 1{x-y>=n}      n-step kernel
//   Q^{-n}(x,y)  = (-1)^{y-x+n} 2^{y-x} C(n, y-x)        inverse powers
//   Qbar^n(x,y)  = 2^{y-x} prod_{j=1..n-1}(x-y-j)/(n-1)! polynomial
//                  extension of Q^n; agrees with Q^n on x-y >= 1 and is
//                  annihilated there by Q^{-n}
//
// and the t-deformed pair (coefficient extraction around w = 0)
//
//   S_{-t,-n}(z1,z2)  = 2^{z1-z2} e^{-t(r/2+2l)} [w^{n+z2-z1}] (1-w)^n e^{t(rw+l/w)}
//   Sbar_{-t,n}(z1,z2)= 2^{z2-z1} e^{t(2l-r/2)}  [w^{n-1}] (1-w)^{z2-z1+n-1}
//                                                 e^{trw} e^{-tl/(1-w)}
//
// All functions return the power of two separately (kernel_value) so that
// compositions can be carried out on the conjugated mantissas.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kolmo/contour.hpp"
#include "kolmo/dyadic.hpp"
#include "kolmo/math_util.hpp"
#include "kolmo/types.hpp"

namespace kolmo::lattice {

inline kernel_value q_kernel(site_t x, site_t y) {
  return {x > y ? 1.0 : 0.0, y - x};
}

inline kernel_value q_pow(int n, site_t x, site_t y) {
  if (n < 0) throw std::invalid_argument("q_pow: n must be >= 0");
  if (n == 0) return {x == y ? 1.0 : 0.0, 0};
  if (x - y < n) return {0.0, y - x};
  return {binom(x - y - 1, n - 1), y - x};
}

inline kernel_value q_inv_pow(int n, site_t x, site_t y) {
  if (n < 0) throw std::invalid_argument("q_inv_pow: n must be >= 0");
  site_t d = y - x;
  if (d < 0 || d > n) return {0.0, d};
  double sign = ((d + n) % 2 == 0) ? 1.0 : -1.0;
  return {sign * binom(n, d), d};
}

inline kernel_value q_bar(int n, site_t x, site_t y) {
  if (n < 1) throw std::invalid_argument("q_bar: n must be >= 1");
  double p = 1.0;
  for (int j = 1; j <= n - 1; ++j) p *= static_cast<double>(x - y - j);
  return {p / factorial(n - 1), y - x};
}

// e^{-(t/2) nabla^-}(x,y) = e^{-t/2} (t/2)^{x-y} / (x-y)!; a group in t, so t
// may be negative.
inline kernel_value poisson_group(double t, site_t x, site_t y) {
  if (x < y) return {0.0, y - x};
  return {std::exp(-t / 2.0) * pow_over_factorial(t, x - y), y - x};
}

// ---- exact-arithmetic variants (identity suites run these at t = 0) ----

inline bigint binom_exact(long a, long k) {
  if (k < 0) return 0;
  bigint num = 1;
  for (long i = 0; i < k; ++i) num *= bigint(a - i);
  bigint den = 1;
  for (long i = 2; i <= k; ++i) den *= i;
  return num / den;  // divides exactly
}

inline rational pow2_rat(long e) {
  if (e >= 0) return rational(bigint(1) << e, 1);
  return rational(1, bigint(1) << (-e));
}

inline rational q_pow_exact(int n, site_t x, site_t y) {
  if (n == 0) return x == y ? rational(1) : rational(0);
  if (x - y < n) return 0;
  return pow2_rat(y - x) * rational(binom_exact(x - y - 1, n - 1));
}

inline rational q_inv_pow_exact(int n, site_t x, site_t y) {
  site_t d = y - x;
  if (d < 0 || d > n) return 0;
  rational v = pow2_rat(d) * rational(binom_exact(n, d));
  return ((d + n) % 2 == 0) ? v : -v;
}

inline rational q_bar_exact(int n, site_t x, site_t y) {
  bigint num = 1;
  for (int j = 1; j <= n - 1; ++j) num *= bigint(x - y - j);
  bigint den = 1;
  for (long i = 2; i <= n - 1; ++i) den *= i;
  return pow2_rat(y - x) * rational(num, den);
}

// ---- coefficient extraction ----

namespace detail {

// [w^m] (1-w)^a e^{tw} for integer a of either sign; zero for m < 0.
inline double coef_poly_exp(long a, long m, double t) {
  if (m < 0) return 0.0;
  double acc = 0.0;
  double tail = pow_over_factorial(t, m);  // t^{m-j}/(m-j)! at j=0
  for (long j = 0; j <= m; ++j) {
    if (a >= 0 && j > a) break;
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom(a, j) * tail;
    if (t != 0.0)
      tail *= static_cast<double>(m - j) / t;
    else
      tail = (j + 1 == m) ? 1.0 : 0.0;  // t^{m-j-1}/(m-j-1)! degenerates
  }
  return acc;
}

// [w^p] e^{aw + b/w} = sum_k a^{p+k} b^k / ((p+k)! k!), a,b >= 0.
inline double bessel_coef(long p, double a, double b) {
  long k0 = p < 0 ? -p : 0;
  double term = pow_over_factorial(a, p + k0) * pow_over_factorial(b, k0);
  double acc = term;
  for (long k = k0; k < k0 + 100000; ++k) {
    term *= a * b / (static_cast<double>(p + k + 1) * static_cast<double>(k + 1));
    acc += term;
    if (term <= 1e-17 * acc && a * b < static_cast<double>(p + k + 2) * static_cast<double>(k + 2))
      return acc;
  }
  throw numeric_error("bessel_coef: series truncation did not converge");
}

// [w^m] (1-w)^n e^{aw + b/w}, n >= 0, m any integer.
inline double coef_laurent(long n, long m, double a, double b) {
  double acc = 0.0;
  for (long j = 0; j <= n; ++j) {
    double sign = (j % 2 == 0) ? 1.0 : -1.0;
    acc += sign * binom(n, j) * bessel_coef(m - j, a, b);
  }
  return acc;
}

// [w^{n-1}] (1-w)^{d+n-1} e^{aw} e^{-b/(1-w)}
//   = sum_k (-b)^k/k! [w^{n-1}] (1-w)^{d+n-1-k} e^{aw}.
// The inner coefficient is a polynomial of degree n-1 in k, the outer factor
// decays factorially, so truncation is by straight tail smallness.
inline double coef_sbar_push(long d, long n, double a, double b) {
  double kfac = 1.0;  // (-b)^k / k!
  double acc = 0.0;
  int quiet = 0;
  for (long k = 0; k < 100000; ++k) {
    double term = kfac * coef_poly_exp(d + n - 1 - k, n - 1, a);
    acc += term;
    if (b == 0.0) return acc;  // only the k=0 term exists
    double scale = std::max(std::abs(acc), 1e-290);
    if (std::abs(term) <= 1e-17 * scale && b < 0.5 * static_cast<double>(k + 1)) {
      if (++quiet >= 5) return acc;
    } else {
      quiet = 0;
    }
    kfac *= -b / static_cast<double>(k + 1);
  }
  throw numeric_error("coef_sbar_push: series truncation did not converge");
}

inline cplx cpow_int(cplx w, long e) {
  if (e < 0) return 1.0 / cpow_int(w, -e);
  cplx acc{1.0, 0.0};
  while (e > 0) {
    if (e & 1) acc *= w;
    w *= w;
    e >>= 1;
  }
  return acc;
}

}  // namespace detail

// The two-sided series behind S has nonnegative terms, so its only failure
// mode is magnitude overflow; terms peak near e^{t(r+l)}.
inline constexpr double laurent_magnitude_limit = 300.0;

// The extension-kernel series alternates in t*l and cancels down from terms
// of size e^{t*l}, costing roughly one digit per unit; past this point the
// evaluation switches to quadrature, which either converges or refuses.
inline constexpr double sbar_series_limit = 12.0;

// S_{-t,-n}(z1,z2).  At t=0 this is (Q^{-n})^*, at n=0 the adjoint of the
// free-flight group.  For l = 0 the coefficient is a finite sum, exact at
// every t; for l > 0 the series has nonnegative terms and needs only the
// overflow guard.
inline kernel_value s_kernel(double t, int n, site_t z1, site_t z2,
                             rate_params rates = {}) {
  if (n < 0) throw std::invalid_argument("s_kernel: n must be >= 0");
  long m = n + z2 - z1;
  double pre = std::exp(-t * (rates.r / 2.0 + 2.0 * rates.l));
  double coef;
  if (rates.l == 0.0) {
    coef = detail::coef_poly_exp(n, m, t * rates.r);
  } else {
    if (t * (rates.r + rates.l) > laurent_magnitude_limit)
      throw numeric_error("s_kernel: t*(r+l) beyond the stable series range");
    coef = detail::coef_laurent(n, m, t * rates.r, t * rates.l);
  }
  return {pre * coef, z1 - z2};
}

// Sbar_{-t,n}(z1,z2).  At t=0 this is Qbar^n.
inline kernel_value sbar_kernel(double t, int n, site_t z1, site_t z2,
                                rate_params rates = {}) {
  if (n < 1) throw std::invalid_argument("sbar_kernel: n must be >= 1");
  long d = z2 - z1;
  double pre = std::exp(t * (2.0 * rates.l - rates.r / 2.0));
  double coef;
  if (t * rates.l <= sbar_series_limit) {
    coef = detail::coef_sbar_push(d, n, t * rates.r, t * rates.l);
  } else {
    coef = contour_integral(contour_config::gamma0(), [&](cplx w) {
      return detail::cpow_int(1.0 - w, d + n - 1) * detail::cpow_int(w, -n) *
             std::exp(t * (rates.r * w - rates.l / (1.0 - w)));
    });
  }
  return {pre * coef, d};
}

// Psi^n_k(x) = 2^{X0(n-k)-x} e^{-t} [w^{x+k-X0(n-k)}] (1-w)^k e^{tw},
// defined for k <= n-1 (negative k turns (1-w)^k into a full series, still a
// finite coefficient sum).
inline kernel_value psi(int n, int k, site_t x, double t, const particle_config& X0) {
  if (k > n - 1) throw std::invalid_argument("psi: need k <= n-1");
  if (n - k < 1 || n - k > X0.size()) throw std::out_of_range("psi: X0(n-k) undefined");
  site_t anchor = X0.at(n - k);
  return {std::exp(-t) * detail::coef_poly_exp(k, x + k - anchor, t), anchor - x};
}

// G_n(t,x) = ((-1)^n / 2 pi i) oint (1-w)^{-n} w^{-(x-n+1)} e^{t(w-1)} dw,
// the building block of the N-particle transition determinant.  The contour
// is chosen per call so the integrand peaks near the value itself: around the
// order-k pole at w=0 the balancing radius is k/t, around the lone pole at
// w=1 a circle of radius ~n/|k| keeps the w power flat, and with no pole
// inside any contour the integral is zero outright.
inline double schutz_g(int n, double t, site_t x) {
  const long k = x - n + 1;  // order of the pole at w = 0
  if (k <= 0 && n <= 0) return 0.0;
  contour_config cfg;
  if (k >= 1) {
    cfg.center = {0.0, 0.0};
    cfg.radius = t > 0.0 ? std::clamp(static_cast<double>(k) / t, 2.0, 1e8) : 2.0;
  } else {
    cfg.center = {1.0, 0.0};
    cfg.radius = std::min(0.5, static_cast<double>(std::max(n - 1, 1)) /
                                   static_cast<double>(1 - k));
  }
  double v = contour_integral(cfg, [&](cplx w) {
    return detail::cpow_int(1.0 - w, -n) * detail::cpow_int(w, -k) *
           std::exp(t * (w - 1.0));
  });
  return (n % 2 == 0) ? v : -v;
}

// ---- discrete gradients on sampled window functions ----

struct window_fn {
  site_t lo = 0;
  std::vector<double> v;

  site_t hi() const { return lo + static_cast<site_t>(v.size()) - 1; }
  double at(site_t x) const {
    if (x < lo || x > hi()) throw std::out_of_range("window_fn::at");
    return v[static_cast<std::size_t>(x - lo)];
  }
};

enum class grad { minus, plus };  // (f(x)-f(x-1)) resp. (f(x+1)-f(x))

inline window_fn nabla(grad dir, const window_fn& f) {
  if (f.v.size() < 2) throw std::domain_error("nabla: window too small");
  window_fn out;
  out.v.resize(f.v.size() - 1);
  if (dir == grad::minus) {
    out.lo = f.lo + 1;
    for (std::size_t i = 0; i + 1 < f.v.size(); ++i) out.v[i] = f.v[i + 1] - f.v[i];
  } else {
    out.lo = f.lo;
    for (std::size_t i = 0; i + 1 < f.v.size(); ++i) out.v[i] = f.v[i + 1] - f.v[i];
  }
  return out;
}

}  // namespace kolmo::lattice
