#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "kolmo/fredholm.hpp"
#include "kolmo/generator.hpp"
#include "kolmo/math_util.hpp"
#include "kolmo/master_equation.hpp"
#include "kolmo/monte_carlo.hpp"
#include "kolmo/schutz.hpp"
#include "kolmo/types.hpp"

using namespace kolmo;

namespace {

observation_spec make_spec(std::vector<int> idx, std::vector<site_t> lvl) {
  observation_spec s;
  s.indices = std::move(idx);
  s.levels = std::move(lvl);
  return s;
}

}  // namespace

TEST_CASE("process moves", "[generator]") {
  const particle_config X({0, -1, -3});

  CHECK(process::right_movable(X, 1));
  CHECK_FALSE(process::right_movable(X, 2));
  CHECK(process::right_movable(X, 3));

  CHECK(process::with_right_move(X, 1) == particle_config({1, -1, -3}));
  CHECK(process::with_right_move(X, 3) == particle_config({0, -1, -2}));
  CHECK_THROWS_AS(process::with_right_move(X, 2), std::domain_error);

  CHECK(process::with_push_move(X, 1) == particle_config({-1, -2, -3}));
  CHECK(process::with_push_move(X, 2) == particle_config({0, -2, -3}));
  CHECK(process::with_push_move(X, 3) == particle_config({0, -1, -4}));

  const particle_config R({0, -1, -2, -5});
  CHECK(process::block_length(R, 1) == 3);
  CHECK(process::block_length(R, 2) == 2);
  CHECK(process::block_length(R, 3) == 1);
  // a run touching the stored end leaves the true block length unknown
  CHECK_THROWS_AS(process::block_length(R, 4), std::domain_error);
  CHECK_THROWS_AS(process::block_length(particle_config({0, -1}), 1), std::domain_error);
}

TEST_CASE("generator on cylinder functionals", "[generator]") {
  const particle_config X({0, -1});

  const auto indicator = [](const particle_config& y) {
    return y.at(1) > 0 ? 1.0 : 0.0;
  };
  CHECK(process::apply_generator(indicator, X, 2, {1.0, 1.0}) == 1.0);
  CHECK(process::apply_generator(indicator, X, 2, {2.0, 1.0}) == 2.0);

  const auto second = [](const particle_config& y) {
    return static_cast<double>(y.at(2));
  };
  // pushes at both labels move the second coordinate, right moves never do
  CHECK(process::apply_generator(second, X, 2, {1.0, 0.5}) == -1.0);
  CHECK(process::apply_generator(second, X, 2, {1.0, 0.0}) == 0.0);

  CHECK_THROWS_AS(process::apply_generator(second, X, 0, {1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(process::apply_generator(second, X, 3, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("stochastic estimates are reproducible", "[mc]") {
  const particle_config X0({0, -2});
  const observation_spec spec = make_spec({1, 2}, {0, -2});
  oracle::mc_config cfg;
  cfg.seed = 42;
  cfg.samples = 20000;

  const oracle::mc_result a = oracle::mc_estimate(0.8, X0, spec, {1.0, 1.0}, cfg);
  const oracle::mc_result b = oracle::mc_estimate(0.8, X0, spec, {1.0, 1.0}, cfg);
  CHECK(a.p_hat == b.p_hat);
  CHECK(a.std_error == b.std_error);
  CHECK(a.seed == 42);
  CHECK(a.samples == 20000);

  cfg.seed = 43;
  const oracle::mc_result c = oracle::mc_estimate(0.8, X0, spec, {1.0, 1.0}, cfg);
  CHECK(a.p_hat != c.p_hat);  // different streams, same law
  CHECK(std::abs(a.p_hat - c.p_hat) < 5.0 * (a.std_error + c.std_error));
}

TEST_CASE("simulated prefix is autonomous", "[mc]") {
  // Simulating extra particles to the left cannot change the law of the
  // leading coordinates: right moves look right, pushes propagate left.
  const particle_config X0({0, -2, -3, -5});
  const observation_spec lead = make_spec({2}, {-2});
  const observation_spec padded = make_spec({2, 4}, {-2, -1000});

  oracle::mc_config cfg;
  cfg.seed = 7;
  cfg.samples = 60000;
  const oracle::mc_result two = oracle::mc_estimate(0.9, X0, lead, {1.0, 1.0}, cfg);
  const oracle::mc_result four = oracle::mc_estimate(0.9, X0, padded, {1.0, 1.0}, cfg);
  CHECK(std::abs(two.p_hat - four.p_hat) < 5.0 * (two.std_error + four.std_error));
}

TEST_CASE("master equation against closed forms", "[master]") {
  const observation_spec spec = make_spec({1}, {0});
  for (double t : {0.5, 1.3}) {
    const oracle::master_result r = oracle::master_equation(t, particle_config({0}), spec);
    CAPTURE(t);
    CHECK(r.error_bound >= 0.0);
    CHECK(r.error_bound < 1e-8);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(1.0 - std::exp(-t), r.error_bound + 1e-9));
  }
  for (double t : {0.8, 1.6}) {
    const oracle::master_result r =
        oracle::master_equation(t, particle_config({2}), spec, {0.0, 1.0});
    CAPTURE(t);
    CHECK_THAT(r.value, Catch::Matchers::WithinAbs(std::exp(-t) * (1.0 + t), r.error_bound + 1e-9));
  }

  // a tiny box must surface as a large reported bound, not a wrong value
  oracle::master_config tight;
  tight.cap_above = 1;
  tight.cap_below = 1;
  const oracle::master_result r =
      oracle::master_equation(2.0, particle_config({0}), spec, {1.0, 0.0}, tight);
  CHECK(r.error_bound > 0.1);
}

TEST_CASE("master equation against stochastic sampling", "[master]") {
  const particle_config X0({0, -2});
  const observation_spec spec = make_spec({1, 2}, {0, -2});
  const rate_params rates{1.0, 1.0};
  const double t = 0.8;

  const oracle::master_result me = oracle::master_equation(t, X0, spec, rates);
  oracle::mc_config cfg;
  cfg.seed = 11;
  cfg.samples = 200000;
  const oracle::mc_result mc = oracle::mc_estimate(t, X0, spec, rates, cfg);
  CHECK(me.error_bound < 1e-8);
  CHECK(std::abs(me.value - mc.p_hat) < 4.0 * mc.std_error + me.error_bound);
}

TEST_CASE("transition determinants", "[schutz]") {
  // single particle: the determinant collapses to the free Poisson weight
  oracle::schutz_table tbl(1.1);
  for (site_t d = 0; d <= 6; ++d) {
    CAPTURE(d);
    CHECK_THAT(oracle::schutz_transition(tbl, {0}, {d}),
               Catch::Matchers::WithinAbs(std::exp(-1.1) * pow_over_factorial(1.1, d), 1e-12));
  }

  // two blocked particles: transitions must stay a probability vector
  const std::vector<site_t> from = {0, -1};
  oracle::schutz_table tb2(0.7);
  double total = 0.0;
  for (site_t x1 = 0; x1 <= 25; ++x1)
    for (site_t x2 = -1; x2 < x1; ++x2) total += oracle::schutz_transition(tb2, from, {x1, x2});
  CHECK_THAT(total, Catch::Matchers::WithinAbs(1.0, 1e-8));
}

TEST_CASE("enumerated determinant sum against the master equation", "[schutz]") {
  const particle_config X0({0, -2, -3});
  const observation_spec spec = make_spec({1, 3}, {1, -2});
  const double t = 0.9;

  const oracle::schutz_result sz = oracle::schutz_F(t, X0, spec);
  const oracle::master_result me = oracle::master_equation(t, X0, spec);
  CHECK(sz.terms > 0);
  CHECK(sz.tail_bound < 1e-10);
  CHECK(std::abs(sz.value - me.value) < 1e-8 + sz.tail_bound + me.error_bound);
}

TEST_CASE("determinant engine against all oracles", "[routes]") {
  const particle_config X0({-1, -2, -3});
  const observation_spec spec = make_spec({1, 2}, {0, -2});
  const double t = 1.0;

  SECTION("pure right moves") {
    const rate_params rates{1.0, 0.0};
    const fredholm::ft_result fd = fredholm::F_t(t, X0, spec, rates);
    REQUIRE(fd.det.converged);

    const oracle::master_result me = oracle::master_equation(t, X0, spec, rates);
    CHECK(std::abs(fd.value - me.value) < 1e-6 + me.error_bound);

    const oracle::schutz_result sz = oracle::schutz_F(t, X0, spec);
    CHECK(std::abs(fd.value - sz.value) < 1e-6 + sz.tail_bound);

    oracle::mc_config cfg;
    cfg.seed = 5;
    cfg.samples = 100000;
    const oracle::mc_result mc = oracle::mc_estimate(t, X0, spec, rates, cfg);
    CHECK(std::abs(fd.value - mc.p_hat) < 4.0 * mc.std_error);
  }

  SECTION("push moves") {
    const rate_params rates{1.0, 1.0};
    const fredholm::ft_result fd = fredholm::F_t(t, X0, spec, rates);
    REQUIRE(fd.det.converged);

    const oracle::master_result me = oracle::master_equation(t, X0, spec, rates);
    CHECK(std::abs(fd.value - me.value) < 1e-6 + me.error_bound);

    oracle::mc_config cfg;
    cfg.seed = 9;
    cfg.samples = 100000;
    const oracle::mc_result mc = oracle::mc_estimate(t, X0, spec, rates, cfg);
    CHECK(std::abs(fd.value - mc.p_hat) < 4.0 * mc.std_error);
  }

  SECTION("pure pushes") {
    const rate_params rates{0.0, 1.0};
    const fredholm::ft_result fd = fredholm::F_t(t, X0, spec, rates);
    REQUIRE(fd.det.converged);
    const oracle::master_result me = oracle::master_equation(t, X0, spec, rates);
    CHECK(std::abs(fd.value - me.value) < 1e-6 + me.error_bound);
  }
}
