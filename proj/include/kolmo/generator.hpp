#pragma once

// The process generator, applied exactly to cylinder functionals.
//
// Particles are labeled right to left, X(1) > X(2) > ..., with X(0) = +inf.
// A right move of particle k (rate r) requires the gap X(k-1) - X(k) > 1.
// A push move of particle k (rate l) always fires and displaces the maximal
// block of particles sitting immediately left of k: every stored label j >= k
// with X(j) = X(k) - (j - k) moves down by one.

#include <functional>
#include <stdexcept>

#include "kolmo/types.hpp"

namespace kolmo::process {

inline bool right_movable(const particle_config& X, int k) {
  return k == 1 || X.at(k - 1) - X.at(k) > 1;
}

// Number of particles displaced by a push at k.  The run must terminate
// inside the stored configuration; a run reaching the last stored particle
// leaves the block ambiguous.
inline int block_length(const particle_config& X, int k) {
  int b = 1;
  while (k + b <= X.size() && X.at(k + b) == X.at(k) - b) ++b;
  if (k + b > X.size())
    throw std::domain_error("block_length: block reaches the end of the stored configuration");
  return b;
}

inline particle_config with_right_move(const particle_config& X, int k) {
  if (!right_movable(X, k)) throw std::domain_error("with_right_move: site occupied");
  auto v = X.positions();
  v[static_cast<std::size_t>(k - 1)] += 1;
  return particle_config(v);
}

// Push at k, displacing the stored part of the block.  Truncating the block
// at the stored end is exact for functionals of the first k', k' <= stored
// size, coordinates: unstored particles never influence stored ones here.
inline particle_config with_push_move(const particle_config& X, int k) {
  auto v = X.positions();
  v[static_cast<std::size_t>(k - 1)] -= 1;
  for (int j = k + 1; j <= X.size() && X.at(j) == X.at(j - 1) - 1; ++j)
    v[static_cast<std::size_t>(j - 1)] -= 1;
  return particle_config(v);
}

// (L F)(X) for F depending on the first n_max coordinates only.  Moves of
// particles beyond n_max cannot change those coordinates, so the sum over
// k <= n_max is the full generator.
inline double apply_generator(const std::function<double(const particle_config&)>& F,
                              const particle_config& X, int n_max, rate_params rates = {}) {
  if (n_max < 1 || n_max > X.size())
    throw std::invalid_argument("apply_generator: n_max out of range");
  const double base = F(X);
  double acc = 0.0;
  for (int k = 1; k <= n_max; ++k) {
    if (rates.r != 0.0 && right_movable(X, k))
      acc += rates.r * (F(with_right_move(X, k)) - base);
    if (rates.l != 0.0)
      acc += rates.l * (F(with_push_move(X, k)) - base);
  }
  return acc;
}

}  // namespace kolmo::process
