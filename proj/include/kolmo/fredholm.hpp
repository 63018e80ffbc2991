#pragma once

// Windowed realization of the extended kernel
//
//   K(n_i, x; n_j, y) = -Q^{n_j-n_i}(x,y) 1{n_i<n_j}
//                       + sum_b S_{-t,-n_i}(b,x) Sbar^{epi}_{-t,n_j}(b,y)
//
// on the index set {(j,x) : lo_j <= x <= a_j}, conjugated by the diagonal
// 2^x: entries are stored as 2^{x-y} K(...), which cancels every power of
// two in the compositions and leaves polynomially bounded numbers.  The
// determinant and all resolvent traces are invariant under the conjugation.
//
// The contraction index b is bounded below exactly, b >= X0(n_j) + n_j (the
// down-walk cannot reach the epigraph), and above exactly only when l = 0,
// where S_{-t,-n_i}(b,x) = 0 for b > x + n_i.  For l > 0 the coefficient at
// negative index decays like (t*l)^{b-x-n_i}/(b-x-n_i)!, so the sum is cut a
// margin past that point with a factorial tail bound.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "kolmo/epigraph_walk.hpp"
#include "kolmo/lattice_kernels.hpp"
#include "kolmo/types.hpp"

namespace kolmo::fredholm {

using walk::model;

struct window_plan {
  int depth = 32;       // initial points per level: x in [a_j - depth + 1, a_j]
  int growth = 2;
  double tol = 1e-10;   // |det_d - det_{growth*d}| target
  int max_depth = 512;
};

struct window {
  std::vector<site_t> lo, hi;  // inclusive per level
  std::vector<int> offset;
  int dim = 0;

  static window make(const observation_spec& spec, int depth) {
    window w;
    const int m = spec.m();
    w.lo.resize(m);
    w.hi.resize(m);
    w.offset.resize(m);
    for (int j = 0; j < m; ++j) {
      w.hi[j] = spec.levels[static_cast<std::size_t>(j)];
      w.lo[j] = w.hi[j] - depth + 1;
      w.offset[j] = w.dim;
      w.dim += depth;
    }
    return w;
  }

  int rows(int j) const {
    return static_cast<int>(hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)] + 1);
  }
  int index(int j, site_t x) const {
    return offset[static_cast<std::size_t>(j)] + static_cast<int>(x - lo[static_cast<std::size_t>(j)]);
  }
};

// Steps past the l = 0 support cap b = x + n_i that bound the dropped tail
// of the contraction below 1e-20 of the leading coefficient: the smallest d
// with (t*l)^d/d! <= 1e-20 and d >= 2*t*l, so the remainder is dominated by
// a geometric series of ratio <= 1/2.
inline int contraction_margin(double tl) {
  if (tl <= 0.0) return 0;
  int d = 0;
  double term = 1.0;
  while ((term > 1e-20 || static_cast<double>(d) < 2.0 * tl) && d < 400) {
    ++d;
    term *= tl / d;
  }
  return d;
}

// Conjugated extended kernel matrix on the window.
inline Eigen::MatrixXd assemble_kernel(double t, const particle_config& X0,
                                       const observation_spec& spec, const window& win,
                                       rate_params rates = {}) {
  spec.validate(X0.size());
  rates.validate();
  if (rates.l != 0.0 && t * (rates.r + rates.l) > lattice::laurent_magnitude_limit)
    throw numeric_error("assemble_kernel: t*(r+l) beyond the stable series range");
  const int m = spec.m();

  const int margin = contraction_margin(t * rates.l);
  site_t blo = 0, bhi = 0;
  for (int j = 0; j < m; ++j) {
    const int nj = spec.indices[static_cast<std::size_t>(j)];
    const site_t lo_j = X0.at(nj) + nj;
    const site_t hi_j = win.hi[static_cast<std::size_t>(j)] + nj + margin;
    if (j == 0 || lo_j < blo) blo = lo_j;
    if (j == 0 || hi_j > bhi) bhi = hi_j;
  }
  const int nb = bhi >= blo ? static_cast<int>(bhi - blo + 1) : 0;

  // S_i(b, x) = mantissa of S_{-t,-n_i}(b, x); Toeplitz in x - b.
  std::vector<Eigen::MatrixXd> S(static_cast<std::size_t>(m));
  const double s_pre = std::exp(-t * (rates.r / 2.0 + 2.0 * rates.l));
  for (int i = 0; i < m; ++i) {
    const int ni = spec.indices[static_cast<std::size_t>(i)];
    Eigen::MatrixXd& Si = S[static_cast<std::size_t>(i)];
    Si.setZero(nb, win.rows(i));
    for (site_t x = win.lo[static_cast<std::size_t>(i)]; x <= win.hi[static_cast<std::size_t>(i)]; ++x)
      for (site_t b = blo; b <= bhi; ++b) {
        const long mm = ni + x - b;
        if (rates.l == 0.0 && mm < 0) continue;
        double coef = rates.l == 0.0
                          ? lattice::detail::coef_poly_exp(ni, mm, t * rates.r)
                          : lattice::detail::coef_laurent(ni, mm, t * rates.r, t * rates.l);
        Si(b - blo, x - win.lo[static_cast<std::size_t>(i)]) = s_pre * coef;
      }
  }

  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(win.dim, win.dim);
  for (int j = 0; j < m; ++j) {
    const int nj = spec.indices[static_cast<std::size_t>(j)];
    const site_t yl = win.lo[static_cast<std::size_t>(j)];
    const site_t yh = win.hi[static_cast<std::size_t>(j)];

    // sbar mantissa is Toeplitz in d = z2 - z1; hits satisfy B > X0(nj).
    const site_t bmin_hit = X0.at(nj) + 1;
    std::vector<std::vector<double>> tbl(static_cast<std::size_t>(nj + 1));
    const site_t dmin = yl - bhi, dmax = yh - bmin_hit;
    for (int order = 1; order <= nj; ++order) {
      auto& row = tbl[static_cast<std::size_t>(order)];
      row.resize(static_cast<std::size_t>(dmax - dmin + 1));
      for (site_t d = dmin; d <= dmax; ++d)
        row[static_cast<std::size_t>(d - dmin)] =
            lattice::sbar_kernel(t, order, 0, d, rates).mantissa;
    }

    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(nb, win.rows(j));
    for (site_t b = std::max(blo, X0.at(nj) + nj); b <= bhi; ++b) {
      walk::walk_hit_law law = walk::hit_distribution(b, X0, nj);
      for (int k = 0; k < law.horizon; ++k)
        for (const auto& [B, p] : law.mass[static_cast<std::size_t>(k)]) {
          const double w = p.to_double(b - B);
          const auto& row = tbl[static_cast<std::size_t>(nj - k)];
          for (site_t y = yl; y <= yh; ++y)
            E(b - blo, y - yl) += w * row[static_cast<std::size_t>(y - B - dmin)];
        }
    }

    for (int i = 0; i < m; ++i) {
      const int ni = spec.indices[static_cast<std::size_t>(i)];
      auto block = M.block(win.offset[static_cast<std::size_t>(i)],
                           win.offset[static_cast<std::size_t>(j)], win.rows(i), win.rows(j));
      block.noalias() = S[static_cast<std::size_t>(i)].transpose() * E;
      if (ni < nj) {
        const int dn = nj - ni;
        for (site_t x = win.lo[static_cast<std::size_t>(i)]; x <= win.hi[static_cast<std::size_t>(i)]; ++x)
          for (site_t y = yl; y <= yh; ++y)
            if (x - y >= dn)
              block(x - win.lo[static_cast<std::size_t>(i)], y - yl) -= binom(x - y - 1, dn - 1);
      }
    }
  }
  return M;
}

// Unconjugated single entry, assembled independently of the matrix path
// (direct sbar_epi calls); used for cross-checks.
inline kernel_value kernel_entry(double t, const particle_config& X0,
                                 const observation_spec& spec, int i, site_t x,
                                 int j, site_t y, rate_params rates = {}) {
  const int ni = spec.indices[static_cast<std::size_t>(i)];
  const int nj = spec.indices[static_cast<std::size_t>(j)];
  double acc = 0.0;
  const site_t bhi = x + ni + contraction_margin(t * rates.l);
  for (site_t b = X0.at(nj) + nj; b <= bhi; ++b)
    acc += lattice::s_kernel(t, ni, b, x, rates).mantissa *
           walk::sbar_epi(t, nj, X0, b, y, rates).mantissa;
  if (ni < nj && x - y >= nj - ni) acc -= binom(x - y - 1, nj - ni - 1);
  return {acc, y - x};
}

struct det_result {
  double value = 0.0;
  double error = 0.0;  // last refinement increment
  int depth = 0;
  bool converged = false;
};

inline double det_one_minus(const Eigen::MatrixXd& M) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M;
  return A.partialPivLu().determinant();
}

// det(I - M) with the window deepened by `growth` until two successive
// depths agree to plan.tol.
inline det_result fredholm_det(const window_plan& plan,
                               const std::function<Eigen::MatrixXd(int)>& builder) {
  det_result r;
  int depth = plan.depth;
  double prev = det_one_minus(builder(depth));
  while (true) {
    const int next = depth * plan.growth;
    if (next > plan.max_depth) {
      r.value = prev;
      r.error = HUGE_VAL;
      r.depth = depth;
      r.converged = false;
      return r;
    }
    const double cur = det_one_minus(builder(next));
    r.error = std::abs(cur - prev);
    if (r.error <= plan.tol) {
      r.value = cur;
      r.depth = next;
      r.converged = true;
      return r;
    }
    prev = cur;
    depth = next;
  }
}

struct ft_result {
  double value = 0.0;  // clamped to [0, 1]
  double raw = 0.0;    // determinant as computed
  det_result det;
};

// F_t(a; n) = P(X_t(n_j) > a_j for all j) as det(I - chi K chi) over the
// window; the doubling error is reported with every value.
inline ft_result F_t(double t, const particle_config& X0, const observation_spec& spec,
                     rate_params rates = {}, window_plan plan = {}) {
  auto builder = [&](int depth) {
    return assemble_kernel(t, X0, spec, window::make(spec, depth), rates);
  };
  ft_result r;
  r.det = fredholm_det(plan, builder);
  r.raw = r.det.value;
  r.value = std::clamp(r.raw, 0.0, 1.0);
  return r;
}

// ---- derivative structure ----

// Conjugated rank-one block: entry(i,x;j,y) = left[(i,x)] * right[(j,y)].
struct rank_one {
  Eigen::VectorXd left, right;

  Eigen::MatrixXd dense() const { return left * right.transpose(); }
};

namespace detail {

// left[(i,x)] = 2^{x-c} sum_z f(z) S_{-t,-n_i}(z,x), anchored at c = X0(k).
inline Eigen::VectorXd s_adj_f(double t, const particle_config& X0,
                               const observation_spec& spec, const window& win,
                               rate_params rates, int k,
                               const std::function<dyadic(site_t)>& f, site_t target) {
  const site_t c = X0.at(k);
  Eigen::VectorXd left = Eigen::VectorXd::Zero(win.dim);
  for (site_t z = target + k - 1; z <= X0.at(1) + 1; ++z) {
    dyadic fz = f(z);
    if (fz.is_zero()) continue;
    for (int i = 0; i < spec.m(); ++i) {
      const double w = fz.to_double(z - c);
      for (site_t x = win.lo[static_cast<std::size_t>(i)]; x <= win.hi[static_cast<std::size_t>(i)]; ++x)
        left[win.index(i, x)] +=
            w * lattice::s_kernel(t, spec.indices[static_cast<std::size_t>(i)], z, x, rates).mantissa;
    }
  }
  return left;
}

// right[(j,y)] = scale * 2^{c-y} g(y) for g built by the supplied core.
template <class Core>
inline Eigen::VectorXd g_vector(double t, const particle_config& X0,
                                const observation_spec& spec, const window& win,
                                rate_params rates, int k, double scale, Core&& core) {
  const site_t c = X0.at(k);
  Eigen::VectorXd right = Eigen::VectorXd::Zero(win.dim);
  for (int j = 0; j < spec.m(); ++j) {
    const int nj = spec.indices[static_cast<std::size_t>(j)];
    for (site_t y = win.lo[static_cast<std::size_t>(j)]; y <= win.hi[static_cast<std::size_t>(j)]; ++y) {
      auto sbar_m = [&](int order, site_t z1) {
        return lattice::sbar_kernel(t, order, z1, y, rates).mantissa * pow2d(c - z1);
      };
      right[win.index(j, y)] = scale * core(nj, k, sbar_m);
    }
  }
  return right;
}

}  // namespace detail

// Delta^{(k)}: the exact kernel difference under moving particle k (a right
// move for TASEP, a block push for PushASEP), as a conjugated rank one.
inline rank_one delta_k(model mdl, double t, int k, const particle_config& X0,
                        const observation_spec& spec, const window& win,
                        rate_params rates = {}) {
  rank_one u;
  const site_t target = mdl == model::tasep ? X0.at(k) + 1 : X0.at(k);
  u.left = detail::s_adj_f(t, X0, spec, win, rates, k,
                           [&](site_t z) { return walk::f_k(mdl, k, z, X0); }, target);
  u.right = detail::g_vector(t, X0, spec, win, rates, k, 1.0,
                             [&](int nj, int kk, auto&& sbar) {
                               return walk::g_core<double>(mdl, nj, kk, X0, sbar);
                             });
  return u;
}

// dK/dt as a sum of rank ones: r * (1/2) sum_k (S)^* f_k (x) ghat_k (right
// part) plus l * 2 sum_k (S)^* fhat_k (x) ghat^{push}_k (push part).  The
// two-parameter time splitting makes the parts additive.
inline std::vector<rank_one> dK_dt(model mdl, double t, const particle_config& X0,
                                   const observation_spec& spec, const window& win,
                                   rate_params rates = {}) {
  if (mdl == model::tasep && rates.l != 0.0)
    throw std::invalid_argument("dK_dt: TASEP model requires l = 0");
  std::vector<rank_one> parts;
  const int n_m = spec.max_index();
  for (int k = 1; k <= n_m; ++k) {
    if (rates.r != 0.0) {
      rank_one u;
      u.left = detail::s_adj_f(t, X0, spec, win, rates, k,
                               [&](site_t z) { return walk::f_k(walk::model::tasep, k, z, X0); },
                               X0.at(k) + 1);
      u.right = detail::g_vector(t, X0, spec, win, rates, k, rates.r / 2.0,
                                 [&](int nj, int kk, auto&& sbar) {
                                   return walk::g_hat_core<double>(walk::model::tasep, nj, kk, X0, sbar);
                                 });
      parts.push_back(std::move(u));
    }
    if (rates.l != 0.0) {
      rank_one u;
      u.left = detail::s_adj_f(t, X0, spec, win, rates, k,
                               [&](site_t z) { return walk::f_hat_k(k, z, X0); }, X0.at(k));
      u.right = detail::g_vector(t, X0, spec, win, rates, k, 2.0 * rates.l,
                                 [&](int nj, int kk, auto&& sbar) {
                                   return walk::g_hat_core<double>(walk::model::pushasep, nj, kk, X0, sbar);
                                 });
      parts.push_back(std::move(u));
    }
  }
  return parts;
}

// tr[(I - M)^{-1} U] for a rank-one or dense update U on the same window.
inline double resolvent_trace(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                              const rank_one& u) {
  const double v = u.right.dot(lu.solve(u.left));
  if (!std::isfinite(v)) throw numeric_error("resolvent_trace: singular factorization");
  return v;
}

inline double resolvent_trace(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                              const Eigen::MatrixXd& U) {
  const double v = lu.solve(U).trace();
  if (!std::isfinite(v)) throw numeric_error("resolvent_trace: singular factorization");
  return v;
}

inline double resolvent_trace(const Eigen::MatrixXd& M, const rank_one& u) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M;
  return resolvent_trace(A.partialPivLu(), u);
}

}  // namespace kolmo::fredholm
