#pragma once

// Transition probabilities of the pure right-moving process as an N x N
// determinant of one-sided contour kernels, summed over final configurations
// to reproduce P(X_t(n_j) > a_j for all j).  Valid for r = 1, l = 0.
//
//   P(X_t = x | X_0)  =  det[ G_{i-j}(t, x_{N+1-i} - X0(N+1-j)) ]
//
//   G_n(t, x) = (-1)^n/(2 pi i) contour_int (1-w)^{-n} w^{-(x-n+1)} e^{t(w-1)} dw
//
// over a circle around 0 and 1.  Particles only move right, so final sums
// are finite once the top particle is capped; the discarded mass is a
// Poisson tail, reported as a bound.

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kolmo/lattice_kernels.hpp"
#include "kolmo/types.hpp"

namespace kolmo::oracle {

struct schutz_result {
  double value = 0.0;
  double tail_bound = 0.0;
  long terms = 0;
};

class schutz_table {
 public:
  explicit schutz_table(double t) : t_(t) {}

  double g(int n, site_t x) {
    auto it = cache_.find({n, x});
    if (it != cache_.end()) return it->second;
    double v = lattice::schutz_g(n, t_, x);
    cache_.emplace(std::pair<int, site_t>{n, x}, v);
    return v;
  }

 private:
  double t_;
  std::map<std::pair<int, site_t>, double> cache_;
};

inline double schutz_transition(schutz_table& tbl, const std::vector<site_t>& from,
                                const std::vector<site_t>& to) {
  const int N = static_cast<int>(from.size());
  Eigen::MatrixXd A(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      A(i, j) = tbl.g(i - j, to[static_cast<std::size_t>(N - 1 - i)] - from[static_cast<std::size_t>(N - 1 - j)]);
  return A.determinant();
}

inline schutz_result schutz_F(double t, const particle_config& X0, const observation_spec& spec,
                              site_t cap = 30) {
  spec.validate(X0.size());
  const int N = spec.max_index();
  std::vector<site_t> from(X0.positions().begin(), X0.positions().begin() + N);
  const site_t top = X0.at(1) + cap;

  schutz_table tbl(t);
  schutz_result res;

  std::vector<site_t> to(static_cast<std::size_t>(N));
  // Nested descent over final configurations x_1 > ... > x_N with
  // x_k >= X0(k): right moves only.
  std::function<void(int, site_t)> rec = [&](int k, site_t hi) {
    if (k == N) {
      for (std::size_t j = 0; j < spec.indices.size(); ++j)
        if (to[static_cast<std::size_t>(spec.indices[j] - 1)] <= spec.levels[j]) return;
      res.value += schutz_transition(tbl, from, to);
      res.terms += 1;
      return;
    }
    for (site_t x = hi; x >= X0.at(k + 1); --x) {
      to[static_cast<std::size_t>(k)] = x;
      rec(k + 1, x - 1);
    }
  };
  rec(0, top);

  // P(top particle advanced past the cap) <= P(Poisson(t) > cap).
  double cdf = 0.0;
  for (site_t i = 0; i <= cap; ++i) cdf += pow_over_factorial(t, i);
  res.tail_bound = 1.0 - std::exp(-t) * cdf;
  return res;
}

}  // namespace kolmo::oracle
