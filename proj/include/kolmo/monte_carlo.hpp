#pragma once

// Direct stochastic simulation of the particle system, used as an
// independent estimate of P(X_t(n_j) > a_j for all j).
//
// Only the first n_m stored particles are simulated: right moves of particle
// k depend on particles k-1, k only, and a push at k > n_m displaces labels
// >= k only, so the prefix dynamics is autonomous.
//
// Each sample runs on its own engine seeded by a hash of (seed, index);
// results are reproducible for a fixed seed and independent of sample order.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kolmo/generator.hpp"
#include "kolmo/types.hpp"

namespace kolmo::oracle {

struct mc_config {
  std::uint64_t seed = 1;
  long samples = 100000;
};

struct mc_result {
  double p_hat = 0.0;
  double std_error = 0.0;
  long samples = 0;
  std::uint64_t seed = 0;
};

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

// One trajectory of the first n particles up to time t.
inline std::vector<site_t> simulate_prefix(double t, const particle_config& X0, int n,
                                           rate_params rates, std::mt19937_64& eng) {
  std::vector<site_t> x(X0.positions().begin(), X0.positions().begin() + n);
  std::vector<double> rate(static_cast<std::size_t>(2 * n));
  double clock = 0.0;
  while (true) {
    double total = 0.0;
    for (int k = 0; k < n; ++k) {
      const bool open = k == 0 || x[static_cast<std::size_t>(k - 1)] - x[static_cast<std::size_t>(k)] > 1;
      rate[static_cast<std::size_t>(2 * k)] = open ? rates.r : 0.0;
      rate[static_cast<std::size_t>(2 * k + 1)] = rates.l;
      total += rate[static_cast<std::size_t>(2 * k)] + rate[static_cast<std::size_t>(2 * k + 1)];
    }
    clock += -std::log(1.0 - detail::uniform01(eng)) / total;
    if (clock > t) return x;
    double u = detail::uniform01(eng) * total;
    int ev = 0;
    while (ev < 2 * n - 1 && u >= rate[static_cast<std::size_t>(ev)]) u -= rate[static_cast<std::size_t>(ev++)];
    const int k = ev / 2;
    if (ev % 2 == 0) {
      x[static_cast<std::size_t>(k)] += 1;
    } else {
      x[static_cast<std::size_t>(k)] -= 1;
      for (int j = k + 1; j < n && x[static_cast<std::size_t>(j)] == x[static_cast<std::size_t>(j - 1)]; ++j)
        x[static_cast<std::size_t>(j)] -= 1;
    }
  }
}

inline mc_result mc_estimate(double t, const particle_config& X0, const observation_spec& spec,
                             rate_params rates = {}, mc_config cfg = {}) {
  spec.validate(X0.size());
  rates.validate();
  const int n = spec.max_index();
  long hits = 0;
  for (long i = 0; i < cfg.samples; ++i) {
    std::mt19937_64 eng(detail::mix64(cfg.seed ^ detail::mix64(static_cast<std::uint64_t>(i))));
    const auto x = simulate_prefix(t, X0, n, rates, eng);
    bool ok = true;
    for (std::size_t j = 0; j < spec.indices.size(); ++j)
      if (x[static_cast<std::size_t>(spec.indices[j] - 1)] <= spec.levels[j]) { ok = false; break; }
    hits += ok ? 1 : 0;
  }
  mc_result r;
  r.samples = cfg.samples;
  r.seed = cfg.seed;
  r.p_hat = static_cast<double>(hits) / static_cast<double>(cfg.samples);
  r.std_error = std::sqrt(r.p_hat * (1.0 - r.p_hat) / static_cast<double>(cfg.samples));
  return r;
}

}  // namespace kolmo::oracle
