#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "kolmo/types.hpp"

namespace kolmo::lattice {

using cplx = std::complex<double>;

// Positively oriented circle |w - center| = radius.  The factories pin the
// two contours the kernels need: gamma0 encloses only w = 0, gamma01
// encloses both w = 0 and w = 1.
struct contour_config {
  cplx center{0.0, 0.0};
  double radius = 0.5;
  int nodes = 64;
  int max_nodes = 4096;
  double rel_tol = 1e-13;

  void validate() const {
    if (radius <= 0.0) throw std::invalid_argument("contour_config: radius must be positive");
    if (nodes < 16) throw std::invalid_argument("contour_config: need at least 16 nodes");
  }

  static contour_config gamma0() { return {}; }

  static contour_config gamma01() {
    contour_config c;
    c.center = cplx(0.5, 0.0);
    c.radius = 1.2;
    return c;
  }
};

struct contour_result {
  double value = 0.0;      // real part of (1/2pi i) * integral
  double imag = 0.0;       // leftover imaginary part, diagnostic
  int nodes_used = 0;
  bool converged = false;
};

// (1/2pi i) \oint f(w) dw by the trapezoid rule on equispaced nodes:
// (radius/M) * sum_j f(w_j) e^{i theta_j}.  Spectrally accurate for f
// analytic in an annulus around the circle; node count doubles until two
// successive levels agree to rel_tol.
inline contour_result contour_quadrature(const contour_config& cfg,
                                         const std::function<cplx(cplx)>& f) {
  cfg.validate();
  auto level = [&](int m) {
    cplx acc{0.0, 0.0};
    for (int j = 0; j < m; ++j) {
      double th = 2.0 * std::numbers::pi * j / m;
      cplx e{std::cos(th), std::sin(th)};
      acc += f(cfg.center + cfg.radius * e) * e;
    }
    return acc * (cfg.radius / m);
  };

  contour_result r;
  cplx prev = level(cfg.nodes);
  for (int m = cfg.nodes * 2; m <= cfg.max_nodes; m *= 2) {
    cplx cur = level(m);
    double scale = std::max(1.0, std::abs(cur));
    if (std::abs(cur - prev) <= cfg.rel_tol * scale) {
      r.value = cur.real();
      r.imag = cur.imag();
      r.nodes_used = m;
      r.converged = true;
      return r;
    }
    prev = cur;
  }
  r.value = prev.real();
  r.imag = prev.imag();
  r.nodes_used = cfg.max_nodes;
  r.converged = false;
  return r;
}

// Convergence-enforcing wrapper for callers that need a plain number.
inline double contour_integral(const contour_config& cfg,
                               const std::function<cplx(cplx)>& f) {
  contour_result r = contour_quadrature(cfg, f);
  if (!r.converged)
    throw numeric_error("contour_integral: node doubling did not converge");
  return r.value;
}

// Complex-valued variant for integrals that are themselves integrands of an
// outer contour, where dropping the imaginary part would break analyticity.
inline cplx contour_integral_c(const contour_config& cfg,
                               const std::function<cplx(cplx)>& f) {
  contour_result r = contour_quadrature(cfg, f);
  if (!r.converged)
    throw numeric_error("contour_integral_c: node doubling did not converge");
  return {r.value, r.imag};
}

}  // namespace kolmo::lattice
