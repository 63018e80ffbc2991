#pragma once

// First-passage analysis of the geometric(1/2) down-walk B_0, B_1, ... with
// step law P(B_{k+1} = B_k - s) = 2^{-s}, s >= 1, against a strictly
// decreasing curve of thresholds.  "Hit at step k" means B_k > thr[k].  All
// path masses are exact dyadic rationals; two structural facts keep the state
// space finite:
//   * the walk strictly decreases, so once B <= min(thr) no future hit is
//     possible (absorbed as dead mass);
//   * a hit can only happen at a position in (thr[k], start - k].

#include <algorithm>
#include <map>
#include <span>
#include <vector>

#include "kolmo/dyadic.hpp"
#include "kolmo/lattice_kernels.hpp"
#include "kolmo/types.hpp"

namespace kolmo::walk {

inline constexpr int max_walk_width = 512;

struct walk_hit_law {
  site_t start = 0;
  int horizon = 0;  // number of threshold slots
  std::vector<std::map<site_t, dyadic>> mass;  // mass[k][y] = P(tau = k, B_k = y)
  dyadic survival;  // alive under the curve when the horizon ends
  dyadic dead;      // fell to <= min(thr); can never hit

  dyadic total() const {
    dyadic acc = survival + dead;
    for (const auto& layer : mass)
      for (const auto& [y, p] : layer) acc.add_scaled(p);
    return acc;
  }
};

inline walk_hit_law hit_law(site_t start, std::span<const site_t> thr,
                            bool allow_hit_at_start = true) {
  if (thr.empty()) throw std::invalid_argument("hit_law: empty threshold curve");
  const int n = static_cast<int>(thr.size());
  const site_t cut = *std::min_element(thr.begin(), thr.end());

  walk_hit_law law;
  law.start = start;
  law.horizon = n;
  law.mass.resize(static_cast<std::size_t>(n));

  if (allow_hit_at_start && start > thr[0]) {
    law.mass[0][start] = dyadic(1);
    return law;
  }
  if (start <= cut) {
    law.dead = dyadic(1);
    return law;
  }
  if (start - cut > max_walk_width)
    throw numeric_error("hit_law: walk window exceeds width cap");

  std::map<site_t, dyadic> alive;
  alive[start] = dyadic(1);
  for (int k = 1; k < n; ++k) {
    std::map<site_t, dyadic> next;
    for (const auto& [x, p] : alive) {
      law.dead.add_scaled(p, x - cut - 1);  // all jumps landing <= cut
      for (site_t y = x - 1; y > cut; --y) {
        if (y > thr[k])
          law.mass[static_cast<std::size_t>(k)][y].add_scaled(p, x - y);
        else
          next[y].add_scaled(p, x - y);
      }
    }
    alive.swap(next);
  }
  for (const auto& [y, p] : alive) law.survival.add_scaled(p);
  return law;
}

// Hitting law of the strict epigraph of (X0(1),...,X0(n)) from B_0 = start.
inline walk_hit_law hit_distribution(site_t start, const particle_config& X0, int n) {
  std::vector<site_t> thr = X0.curve(n);
  return hit_law(start, thr, true);
}

// P(B_steps = z, B_j <= thr[j] for j = 0..steps-1), exactly.
inline dyadic constrained_propagator(site_t start, std::span<const site_t> thr,
                                     int steps, site_t z) {
  if (steps < 1) return start == z ? dyadic(1) : dyadic();
  if (static_cast<int>(thr.size()) < steps)
    throw std::invalid_argument("constrained_propagator: curve shorter than horizon");
  if (z >= start || start > thr[0]) return dyadic();
  if (start - z > max_walk_width)
    throw numeric_error("constrained_propagator: walk window exceeds width cap");

  std::map<site_t, dyadic> alive;
  alive[start] = dyadic(1);
  for (int k = 1; k <= steps; ++k) {
    std::map<site_t, dyadic> next;
    for (const auto& [x, p] : alive)
      for (site_t y = x - 1; y >= z; --y) {
        if (k < steps && y > thr[k]) continue;  // would hit inside the horizon
        next[y].add_scaled(p, x - y);
      }
    alive.swap(next);
  }
  auto it = alive.find(z);
  return it == alive.end() ? dyadic() : it->second;
}

namespace detail {
template <class T>
T from_dyadic(const dyadic& d);
template <>
inline double from_dyadic<double>(const dyadic& d) { return d.to_double(); }
template <>
inline rational from_dyadic<rational>(const dyadic& d) { return d.to_rational(); }
}  // namespace detail

// sum over hit atoms of mass(k,y) * f(k,y) in the ring T.
template <class T, class F>
T expect_hits(const walk_hit_law& law, F&& f) {
  T acc = T(0);
  for (int k = 0; k < law.horizon; ++k)
    for (const auto& [y, p] : law.mass[static_cast<std::size_t>(k)])
      acc += detail::from_dyadic<T>(p) * f(k, y);
  return acc;
}

// Sbar^{epi}_{-t,n}(z1,z2) = E_{B_0=z1}[ Sbar_{-t,n-tau}(B_tau, z2) ; tau < n ].
// Vanishes for z1 < X0(n) + n: the walk drops by at least one per step, so no
// hit is reachable from below that line.
inline kernel_value sbar_epi(double t, int n, const particle_config& X0,
                             site_t z1, site_t z2, rate_params rates = {}) {
  if (n < 0) throw std::invalid_argument("sbar_epi: n must be >= 0");
  if (n == 0) return {0.0, z2 - z1};
  walk_hit_law law = hit_distribution(z1, X0, n);
  double m = 0.0;
  for (int k = 0; k < law.horizon; ++k)
    for (const auto& [y, p] : law.mass[static_cast<std::size_t>(k)])
      m += p.to_double(z1 - y) *
           lattice::sbar_kernel(t, n - k, y, z2, rates).mantissa;
  return {m, z2 - z1};
}

// t = 0 specialization in exact arithmetic (Sbar_{0,n} = Qbar^n).
inline rational sbar_epi_exact0(int n, const particle_config& X0,
                                site_t z1, site_t z2) {
  if (n == 0) return 0;
  walk_hit_law law = hit_distribution(z1, X0, n);
  return expect_hits<rational>(law, [&](int k, site_t y) {
    return lattice::q_bar_exact(n - k, y, z2);
  });
}

// ---- rank-one ingredients of the kernel derivative ----

enum class model { tasep, pushasep };

// TASEP: f_k(z) = P_z(tau = k-1, B_{k-1} = X0(k)+1), hitting the original
// curve for the first time at the lowest admissible site.
// PushASEP: f_k(z) = P_z(tau~ = k-1, B_{k-1} = X0(k)) where tau~ hits the
// curve with particle k (and its block) moved one step left; only the k-th
// threshold ever matters for the change.
inline dyadic f_k(model mdl, int k, site_t z, const particle_config& X0) {
  if (k < 1 || k > X0.size()) throw std::out_of_range("f_k: bad k");
  std::vector<site_t> thr = X0.curve(k);
  site_t target = X0.at(k) + 1;
  if (mdl == model::pushasep) {
    thr[static_cast<std::size_t>(k - 1)] -= 1;
    target = X0.at(k);
  }
  walk_hit_law law = hit_law(z, thr, true);
  const auto& layer = law.mass[static_cast<std::size_t>(k - 1)];
  auto it = layer.find(target);
  return it == layer.end() ? dyadic() : it->second;
}

// PushASEP companion with the whole curve shifted down by one.  Not equal to
// f_k pointwise: a path touching the curve (B_j = X0(j+1) for some j < k-1)
// hits the lowered curve early but not the one with the k-block moved.  Only
// the sums over k of the paired rank-one products coincide; the identity
// suite pins both facts.
inline dyadic f_hat_k(int k, site_t z, const particle_config& X0) {
  if (k < 1 || k > X0.size()) throw std::out_of_range("f_hat_k: bad k");
  std::vector<site_t> thr = X0.curve(k);
  for (auto& c : thr) c -= 1;
  walk_hit_law law = hit_law(z, thr, true);
  const auto& layer = law.mass[static_cast<std::size_t>(k - 1)];
  auto it = layer.find(X0.at(k));
  return it == layer.end() ? dyadic() : it->second;
}

// Walk restarted at `from` at step k-1; hits counted from step k on against
// the original curve.  Offset i in the returned law corresponds to the
// restricted hitting time tau^{(k)} = k-1+i.
inline walk_hit_law restart_law(site_t from, int k, int n, const particle_config& X0) {
  std::vector<site_t> thr;
  thr.reserve(static_cast<std::size_t>(n - k + 1));
  thr.push_back(from + 1);  // slot for step k-1, disabled below
  for (int j = k + 1; j <= n; ++j) thr.push_back(X0.at(j));
  return hit_law(from, thr, false);
}

// g^{(n)}_k and its shifted companion ghat^{(n)}_k, generically over the ring
// T and the kernel closure sbar(order, z1).  For TASEP, ghat = 2 g exactly:
// the first step from X0(k)+1 halves every path weight.  For PushASEP the
// pointwise relation ghat = g/2 fails at boundary sites; only the aggregate
// sum_k 2 fhat ghat = sum_k f g holds.
template <class T, class SbarFn>
T g_core(model mdl, int n, int k, const particle_config& X0, SbarFn&& sbar) {
  if (k > n) return T(0);
  const site_t xk = X0.at(k);
  if (mdl == model::tasep) {
    walk_hit_law law = restart_law(xk + 1, k, n, X0);
    T e = expect_hits<T>(law, [&](int i, site_t y) { return sbar(n - k + 1 - i, y); });
    return e - sbar(n - k + 1, xk + 1);
  }
  walk_hit_law law = restart_law(xk, k, n, X0);
  T e = expect_hits<T>(law, [&](int i, site_t y) { return sbar(n - k + 1 - i, y); });
  return sbar(n - k + 1, xk) - e;
}

template <class T, class SbarFn>
T g_hat_core(model mdl, int n, int k, const particle_config& X0, SbarFn&& sbar) {
  if (k > n) return T(0);
  const site_t xk = X0.at(k);
  walk_hit_law law = restart_law(xk, k, n, X0);
  if (mdl == model::tasep) {
    T e = expect_hits<T>(law, [&](int i, site_t y) { return sbar(n - k + 1 - i, y); });
    return e - sbar(n - k + 1, xk);
  }
  T e = expect_hits<T>(law, [&](int i, site_t y) { return sbar(n - k + 1 - i, y + 1); });
  return sbar(n - k + 1, xk + 1) - e;
}

inline double g_k(model mdl, double t, int n, int k, site_t z,
                  const particle_config& X0, rate_params rates = {}) {
  return g_core<double>(mdl, n, k, X0, [&](int order, site_t z1) {
    return lattice::sbar_kernel(t, order, z1, z, rates).value();
  });
}

inline double g_hat_k(model mdl, double t, int n, int k, site_t z,
                      const particle_config& X0, rate_params rates = {}) {
  return g_hat_core<double>(mdl, n, k, X0, [&](int order, site_t z1) {
    return lattice::sbar_kernel(t, order, z1, z, rates).value();
  });
}

inline rational g_k_exact0(model mdl, int n, int k, site_t z,
                           const particle_config& X0) {
  return g_core<rational>(mdl, n, k, X0, [&](int order, site_t z1) {
    return lattice::q_bar_exact(order, z1, z);
  });
}

inline rational g_hat_k_exact0(model mdl, int n, int k, site_t z,
                               const particle_config& X0) {
  return g_hat_core<rational>(mdl, n, k, X0, [&](int order, site_t z1) {
    return lattice::q_bar_exact(order, z1, z);
  });
}

}  // namespace kolmo::walk
