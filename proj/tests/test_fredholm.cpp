#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "kolmo/epigraph_walk.hpp"
#include "kolmo/fredholm.hpp"
#include "kolmo/lattice_kernels.hpp"
#include "kolmo/types.hpp"

using namespace kolmo;
using namespace kolmo::fredholm;

namespace {

observation_spec make_spec(std::vector<int> idx, std::vector<site_t> lvl) {
  observation_spec s;
  s.indices = std::move(idx);
  s.levels = std::move(lvl);
  return s;
}

particle_config tasep_moved(const particle_config& x, int k) {
  auto p = x.positions();
  p[static_cast<std::size_t>(k - 1)] += 1;
  return particle_config(p);
}

particle_config push_moved(const particle_config& x, int k) {
  auto p = x.positions();
  p[static_cast<std::size_t>(k - 1)] -= 1;
  for (std::size_t j = static_cast<std::size_t>(k); j < p.size() && p[j] == p[j - 1]; ++j)
    p[j] -= 1;
  return particle_config(p);
}

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("window layout", "[fredholm]") {
  const observation_spec spec = make_spec({1, 3}, {1, -2});
  const window w = window::make(spec, 8);
  CHECK(w.dim == 16);
  CHECK(w.lo[0] == -6);
  CHECK(w.hi[0] == 1);
  CHECK(w.lo[1] == -9);
  CHECK(w.hi[1] == -2);
  CHECK(w.rows(0) == 8);
  CHECK(w.index(0, -6) == 0);
  CHECK(w.index(0, 1) == 7);
  CHECK(w.index(1, -9) == 8);
  CHECK(w.index(1, -2) == 15);
}

TEST_CASE("matrix assembly against independent entries", "[fredholm]") {
  const particle_config X0({0, -2, -3});
  const observation_spec spec = make_spec({1, 3}, {1, -2});
  const window win = window::make(spec, 10);

  for (double t : {0.4, 1.1})
    for (rate_params rates : {rate_params{1.0, 0.0}, rate_params{0.7, 0.5}}) {
      const Eigen::MatrixXd M = assemble_kernel(t, X0, spec, win, rates);
      for (int i = 0; i < spec.m(); ++i)
        for (int j = 0; j < spec.m(); ++j)
          for (site_t x = win.lo[static_cast<std::size_t>(i)]; x <= win.hi[static_cast<std::size_t>(i)]; ++x)
            for (site_t y = win.lo[static_cast<std::size_t>(j)]; y <= win.hi[static_cast<std::size_t>(j)]; ++y) {
              const double got = M(win.index(i, x), win.index(j, y));
              const double want = kernel_entry(t, X0, spec, i, x, j, y, rates).mantissa;
              CAPTURE(t, rates.l, i, j, x, y);
              REQUIRE_THAT(got, Catch::Matchers::WithinAbs(want, 1e-12 * (1.0 + std::abs(want))));
            }
    }
}

TEST_CASE("extended kernel in exact arithmetic at t = 0", "[fredholm]") {
  // Independent route: S_{0,-n} reduces to the inverse walk power and the
  // epigraph closure reduces to its rational specialization, so every entry
  // is a finite rational sum.
  const particle_config X0({0, -2, -3});
  const observation_spec spec = make_spec({1, 3}, {1, -2});
  const window win = window::make(spec, 8);
  const Eigen::MatrixXd M = assemble_kernel(0.0, X0, spec, win);

  for (int i = 0; i < spec.m(); ++i)
    for (int j = 0; j < spec.m(); ++j) {
      const int ni = spec.indices[static_cast<std::size_t>(i)];
      const int nj = spec.indices[static_cast<std::size_t>(j)];
      for (site_t x = win.lo[static_cast<std::size_t>(i)]; x <= win.hi[static_cast<std::size_t>(i)]; ++x)
        for (site_t y = win.lo[static_cast<std::size_t>(j)]; y <= win.hi[static_cast<std::size_t>(j)]; ++y) {
          rational want = 0;
          for (site_t b = X0.at(nj) + nj; b <= x + ni; ++b)
            want += lattice::q_inv_pow_exact(ni, x, b) *
                    walk::sbar_epi_exact0(nj, X0, b, y);
          if (ni < nj) want -= lattice::q_pow_exact(nj - ni, x, y);
          const double want_m = (want * lattice::pow2_rat(x - y)).convert_to<double>();

          CAPTURE(i, j, x, y);
          const kernel_value entry = kernel_entry(0.0, X0, spec, i, x, j, y);
          REQUIRE(entry.log2_scale == y - x);
          REQUIRE_THAT(entry.mantissa,
                       Catch::Matchers::WithinAbs(want_m, 1e-12 * (1.0 + std::abs(want_m))));
          REQUIRE_THAT(M(win.index(i, x), win.index(j, y)),
                       Catch::Matchers::WithinAbs(want_m, 1e-12 * (1.0 + std::abs(want_m))));
        }
    }
}

TEST_CASE("determinant at t = 0 is the initial indicator", "[fredholm]") {
  struct row {
    std::vector<site_t> pos;
    std::vector<int> idx;
    std::vector<site_t> lvl;
    double want;
  };
  const std::vector<row> rows = {
      {{0}, {1}, {-1}, 1.0},
      {{0}, {1}, {0}, 0.0},
      {{0, -2, -3}, {1, 2}, {-1, -3}, 1.0},
      {{0, -2, -3}, {1, 2}, {-1, -2}, 0.0},
      {{0, -2, -3}, {1, 2, 3}, {-1, -3, -4}, 1.0},
      {{0, -2, -3}, {2, 3}, {-3, -3}, 0.0},
      {{5, 2, 0, -4}, {1, 3}, {2, -1}, 1.0},
  };
  for (std::size_t c = 0; c < rows.size(); ++c) {
    const particle_config X0(rows[c].pos);
    const observation_spec spec = make_spec(rows[c].idx, rows[c].lvl);
    const ft_result r = F_t(0.0, X0, spec);
    CAPTURE(c);
    CHECK(r.det.converged);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(rows[c].want, 1e-10));
  }
}

TEST_CASE("single-particle closed forms", "[fredholm]") {
  // One particle, one level at its starting site: the survival probability
  // of the first jump clock.
  const particle_config X0({0});
  const observation_spec spec = make_spec({1}, {0});
  for (double t : {0.5, 1.0, 2.0}) {
    const ft_result r = F_t(t, X0, spec);
    CAPTURE(t);
    CHECK(r.det.converged);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(1.0 - std::exp(-t), 1e-8));
  }

  // A pure pusher only jumps left, so the count of left jumps is Poisson.
  const particle_config Y({2});
  for (double t : {0.8, 1.6}) {
    const ft_result r = F_t(t, Y, spec, rate_params{0.0, 1.0});
    CAPTURE(t);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(std::exp(-t) * (1.0 + t), 1e-8));
  }
}

TEST_CASE("kernel difference under a single move is rank one", "[fredholm]") {
  const particle_config X0({0, -2, -3});
  const observation_spec spec = make_spec({1, 3}, {1, -2});
  const window win = window::make(spec, 12);

  struct move_case {
    model mdl;
    int k;
    rate_params rates;
  };
  const std::vector<move_case> cases = {
      {model::tasep, 1, {1.0, 0.0}},    {model::tasep, 2, {1.0, 0.0}},
      {model::pushasep, 1, {0.6, 0.8}}, {model::pushasep, 2, {1.0, 1.0}},
      {model::pushasep, 3, {0.0, 1.0}},
  };
  const double t = 0.7;
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& mc = cases[c];
    const particle_config Xt =
        mc.mdl == model::tasep ? tasep_moved(X0, mc.k) : push_moved(X0, mc.k);
    const Eigen::MatrixXd diff = assemble_kernel(t, Xt, spec, win, mc.rates) -
                                 assemble_kernel(t, X0, spec, win, mc.rates);
    const rank_one u = delta_k(mc.mdl, t, mc.k, X0, spec, win, mc.rates);
    CAPTURE(c);
    REQUIRE(max_abs(diff - u.dense()) < 1e-10);
  }

  // a blocked right move contributes nothing
  const rank_one blocked = delta_k(model::tasep, t, 3, X0, spec, win);
  CHECK(max_abs(blocked.dense()) == 0.0);
}

TEST_CASE("kernel derivative matches finite differences", "[fredholm]") {
  const particle_config X0({0, -2, -3});
  const observation_spec spec = make_spec({1, 3}, {1, -2});
  const window win = window::make(spec, 12);

  struct dcase {
    model mdl;
    rate_params rates;
    double t;
  };
  const std::vector<dcase> cases = {
      {model::tasep, {1.0, 0.0}, 0.8},
      {model::pushasep, {0.0, 1.0}, 0.9},
      {model::pushasep, {1.0, 1.0}, 0.6},
      {model::pushasep, {0.4, 1.3}, 0.5},
  };
  for (std::size_t c = 0; c < cases.size(); ++c) {
    const auto& dc = cases[c];
    Eigen::MatrixXd dsum = Eigen::MatrixXd::Zero(win.dim, win.dim);
    for (const rank_one& u : dK_dt(dc.mdl, dc.t, X0, spec, win, dc.rates))
      dsum += u.dense();

    auto slope = [&](double h) {
      return ((assemble_kernel(dc.t + h, X0, spec, win, dc.rates) -
               assemble_kernel(dc.t - h, X0, spec, win, dc.rates)) /
              (2.0 * h))
          .eval();
    };
    const Eigen::MatrixXd fd = (4.0 * slope(5e-4) - slope(1e-3)) / 3.0;
    CAPTURE(c);
    REQUIRE(max_abs(fd - dsum) < 1e-9);
  }

  CHECK_THROWS_AS(dK_dt(model::tasep, 0.5, X0, spec, win, rate_params{1.0, 0.5}),
                  std::invalid_argument);
}

TEST_CASE("resolvent trace and the rank-one determinant ratio", "[fredholm]") {
  const particle_config X0({-1, -2, -3});
  const observation_spec spec = make_spec({1, 2}, {0, -2});
  const window win = window::make(spec, 12);
  const double t = 0.8;

  const Eigen::MatrixXd M = assemble_kernel(t, X0, spec, win);
  const rank_one u = delta_k(model::tasep, t, 2, X0, spec, win);

  const double base = det_one_minus(M);
  const double moved = det_one_minus(M + u.dense());
  const double tr = resolvent_trace(M, u);
  REQUIRE(base != 0.0);
  CHECK_THAT(moved / base, Catch::Matchers::WithinAbs(1.0 - tr, 1e-10 * (1.0 + std::abs(tr))));

  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(win.dim, win.dim) - M;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu = A.partialPivLu();
  CHECK_THAT(resolvent_trace(lu, u.dense()),
             Catch::Matchers::WithinAbs(tr, 1e-12 * (1.0 + std::abs(tr))));
}

TEST_CASE("window deepening settles the determinant", "[fredholm]") {
  const particle_config X0({-1, -2, -3});
  const observation_spec spec = make_spec({1, 2}, {0, -3});
  const double t = 1.0;

  window_plan shallow;
  shallow.depth = 8;
  const ft_result a = F_t(t, X0, spec, {}, shallow);
  const ft_result b = F_t(t, X0, spec, {}, {});
  CHECK(a.det.converged);
  CHECK(b.det.converged);
  CHECK(a.det.error <= shallow.tol);
  CHECK_THAT(a.value, Catch::Matchers::WithinAbs(b.value, 1e-8));

  // an unreachable tolerance must be reported, not absorbed
  window_plan doomed;
  doomed.depth = 4;
  doomed.max_depth = 8;
  doomed.tol = -1.0;
  auto builder = [&](int depth) {
    return assemble_kernel(t, X0, spec, window::make(spec, depth));
  };
  const det_result r = fredholm_det(doomed, builder);
  CHECK_FALSE(r.converged);
  CHECK(r.error == HUGE_VAL);
}
