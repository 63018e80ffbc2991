#pragma once

// Truncated master equation for the prefix dynamics, integrated by
// uniformization.  The state space is every strictly decreasing n-tuple in a
// finite box; transitions leaving the box feed an absorbing escape state, so
// the truncation error is tracked, not assumed.
//
// P(event at time t) = sum_j e^{-Lt} (Lt)^j / j! * <event, P^j delta_X0>
// with L = n (r + l) an upper bound for every total exit rate; the Poisson
// tail is cut when the accumulated weight reaches 1 - epsilon.

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "kolmo/types.hpp"

namespace kolmo::oracle {

struct master_config {
  double epsilon = 1e-10;   // Poisson tail cut
  site_t cap_above = -1;    // box ceiling offset from X0(1); derived from t, r if < 0
  site_t cap_below = -1;    // box floor offset below min(X0(n), a_j); derived from t, l if < 0
  long max_states = 2000000;
};

struct master_result {
  double value = 0.0;
  double error_bound = 0.0;
  long states = 0;
  long iterations = 0;
};

namespace detail {

inline site_t drift_cap(double mean) {
  return static_cast<site_t>(std::ceil(mean + 10.0 * std::sqrt(mean + 1.0) + 10.0));
}

// Strictly decreasing n-tuples with floor <= x_n, x_1 <= ceil.
inline void enumerate_tuples(site_t floor_, site_t ceil_, int n, std::vector<site_t>& cur,
                             std::vector<std::vector<site_t>>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  site_t hi = cur.empty() ? ceil_ : cur.back() - 1;
  // Leave room for the remaining coordinates above the floor.
  const site_t need = static_cast<site_t>(n - static_cast<int>(cur.size()) - 1);
  for (site_t x = hi; x - need >= floor_; --x) {
    cur.push_back(x);
    enumerate_tuples(floor_, ceil_, n, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

inline master_result master_equation(double t, const particle_config& X0,
                                     const observation_spec& spec, rate_params rates = {},
                                     master_config cfg = {}) {
  spec.validate(X0.size());
  rates.validate();
  const int n = spec.max_index();

  if (cfg.cap_above < 0) cfg.cap_above = detail::drift_cap(rates.r * t);
  if (cfg.cap_below < 0) cfg.cap_below = detail::drift_cap(rates.l * t);
  const site_t ceil_ = X0.at(1) + cfg.cap_above;
  site_t base = X0.at(n);
  for (site_t a : spec.levels) base = std::min(base, a);
  const site_t floor_ = base - cfg.cap_below;

  std::vector<std::vector<site_t>> states;
  {
    std::vector<site_t> cur;
    detail::enumerate_tuples(floor_, ceil_, n, cur, states);
  }
  if (static_cast<long>(states.size()) > cfg.max_states)
    throw numeric_error("master_equation: state space exceeds cap");
  std::map<std::vector<site_t>, long> index;
  for (long s = 0; s < static_cast<long>(states.size()); ++s) index[states[static_cast<std::size_t>(s)]] = s;

  const long S = static_cast<long>(states.size());
  const long esc = S;  // absorbing escape state
  const double lam = n * (rates.r + rates.l);

  // Sparse uniformized step P = I + G / lam, rows built once.
  struct edge { long to; double w; };
  std::vector<std::vector<edge>> rows(static_cast<std::size_t>(S));
  for (long s = 0; s < S; ++s) {
    const auto& x = states[static_cast<std::size_t>(s)];
    auto& row = rows[static_cast<std::size_t>(s)];
    double out_rate = 0.0;
    auto add = [&](std::vector<site_t> y, double rate) {
      out_rate += rate;
      auto it = index.find(y);
      row.push_back({it == index.end() ? esc : it->second, rate / lam});
    };
    for (int k = 0; k < n; ++k) {
      if (rates.r != 0.0 && (k == 0 || x[static_cast<std::size_t>(k - 1)] - x[static_cast<std::size_t>(k)] > 1)) {
        auto y = x;
        y[static_cast<std::size_t>(k)] += 1;
        add(std::move(y), rates.r);
      }
      if (rates.l != 0.0) {
        auto y = x;
        y[static_cast<std::size_t>(k)] -= 1;
        for (int j = k + 1; j < n && y[static_cast<std::size_t>(j)] == y[static_cast<std::size_t>(j - 1)]; ++j)
          y[static_cast<std::size_t>(j)] -= 1;
        add(std::move(y), rates.l);
      }
    }
    row.push_back({s, 1.0 - out_rate / lam});
  }

  std::vector<char> in_event(static_cast<std::size_t>(S));
  for (long s = 0; s < S; ++s) {
    const auto& x = states[static_cast<std::size_t>(s)];
    bool ok = true;
    for (std::size_t j = 0; j < spec.indices.size(); ++j)
      if (x[static_cast<std::size_t>(spec.indices[j] - 1)] <= spec.levels[j]) { ok = false; break; }
    in_event[static_cast<std::size_t>(s)] = ok ? 1 : 0;
  }

  std::vector<double> v(static_cast<std::size_t>(S + 1), 0.0), w(static_cast<std::size_t>(S + 1), 0.0);
  std::vector<site_t> start(X0.positions().begin(), X0.positions().begin() + n);
  v[static_cast<std::size_t>(index.at(start))] = 1.0;

  master_result res;
  res.states = S;
  const double lt = lam * t;
  const long j_cap = static_cast<long>(lt + 12.0 * std::sqrt(lt + 1.0) + 200.0);
  double weight = std::exp(-lt);
  double cum = 0.0;
  double escaped = 0.0;
  long j = 0;
  while (true) {
    double ev = 0.0;
    for (long s = 0; s < S; ++s)
      if (in_event[static_cast<std::size_t>(s)]) ev += v[static_cast<std::size_t>(s)];
    res.value += weight * ev;
    escaped += weight * v[static_cast<std::size_t>(esc)];
    cum += weight;
    if (cum >= 1.0 - cfg.epsilon || j >= j_cap) break;
    std::fill(w.begin(), w.end(), 0.0);
    for (long s = 0; s < S; ++s) {
      const double vs = v[static_cast<std::size_t>(s)];
      if (vs == 0.0) continue;
      for (const auto& e : rows[static_cast<std::size_t>(s)])
        w[static_cast<std::size_t>(e.to)] += vs * e.w;
    }
    w[static_cast<std::size_t>(esc)] += v[static_cast<std::size_t>(esc)];
    v.swap(w);
    ++j;
    weight *= lt / static_cast<double>(j);
  }
  res.iterations = j + 1;
  // Mass that escaped the box could have re-entered the event; the Poisson
  // tail is unaccounted entirely.
  res.error_bound = escaped + (1.0 - cum) + 2.0 * cfg.epsilon;
  return res;
}

}  // namespace kolmo::oracle
