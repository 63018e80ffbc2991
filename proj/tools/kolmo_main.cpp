// Command-line frontend: determinant evaluation, cross-checked oracles, and
// the verification suites, with JSON or CSV reports.
//
// Exit codes: 0 success, 1 verification failure, 2 numeric non-convergence,
// 64 usage or configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kolmo/fredholm.hpp"
#include "kolmo/master_equation.hpp"
#include "kolmo/monte_carlo.hpp"
#include "kolmo/schutz.hpp"
#include "kolmo/verification.hpp"
#include "run_config.hpp"

namespace {

using kolmo::cli::json;
using kolmo::cli::run_config;

constexpr int exit_ok = 0;
constexpr int exit_check_failed = 1;
constexpr int exit_no_convergence = 2;
constexpr int exit_usage = 64;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

run_config load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw kolmo::cli::config_error("cannot open config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const std::exception& e) {
    throw kolmo::cli::config_error(std::string("config parse error: ") + e.what());
  }
  return kolmo::cli::parse_config(j);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw kolmo::cli::config_error("cannot open output file: " + out_path);
  out << text;
  if (text.empty() || text.back() != '\n') out << '\n';
}

json check_to_json(const kolmo::verify::check_report& c) {
  json j;
  j["name"] = c.name;
  j["instance"] = c.instance;
  j["residual"] = c.residual;
  j["tolerance"] = c.tolerance;
  j["passed"] = c.passed;
  j["route"] = c.route;
  return j;
}

struct route_values {
  kolmo::fredholm::ft_result det;
  std::optional<kolmo::oracle::mc_result> mc;
  std::optional<kolmo::oracle::master_result> master;
  std::optional<kolmo::oracle::schutz_result> schutz;
};

route_values evaluate_routes(const run_config& cfg, double t, bool cross_check) {
  route_values v;
  v.det = kolmo::fredholm::F_t(t, cfg.initial(), cfg.spec(), cfg.rates(), cfg.window);
  if (cross_check) {
    v.mc = kolmo::oracle::mc_estimate(t, cfg.initial(), cfg.spec(), cfg.rates(), cfg.mc);
    kolmo::oracle::master_config mcfg;
    mcfg.epsilon = cfg.oracle_epsilon;
    v.master = kolmo::oracle::master_equation(t, cfg.initial(), cfg.spec(), cfg.rates(), mcfg);
    if (cfg.rates().r == 1.0 && cfg.rates().l == 0.0)
      v.schutz = kolmo::oracle::schutz_F(t, cfg.initial(), cfg.spec(), cfg.oracle_cap);
  }
  return v;
}

json routes_to_json(double t, const route_values& v) {
  json j;
  j["t"] = t;
  j["F_det"] = v.det.value;
  j["F_det_raw"] = v.det.raw;
  j["window"] = {{"depth", v.det.det.depth},
                 {"error", v.det.det.error},
                 {"converged", v.det.det.converged}};
  if (v.mc) {
    j["F_mc"] = v.mc->p_hat;
    j["F_mc_stderr"] = v.mc->std_error;
    j["mc_samples"] = v.mc->samples;
    j["mc_seed"] = v.mc->seed;
  }
  if (v.master) {
    j["F_oracle"] = v.master->value;
    j["F_oracle_bound"] = v.master->error_bound;
    j["oracle_states"] = v.master->states;
    j["oracle_iterations"] = v.master->iterations;
  }
  if (v.schutz) {
    j["F_schutz"] = v.schutz->value;
    j["F_schutz_tail"] = v.schutz->tail_bound;
    j["schutz_terms"] = v.schutz->terms;
  }
  return j;
}

int cmd_compute(const run_config& cfg, bool cross_check, const std::string& format,
                const std::string& out_path) {
  bool converged = true;
  std::string text;
  if (format == "csv") {
    std::ostringstream os;
    os << "t,F_det,F_det_err,F_mc,F_mc_stderr,F_oracle,oracle_bound\n";
    for (double t : cfg.t_grid) {
      const route_values v = evaluate_routes(cfg, t, cross_check);
      converged = converged && v.det.det.converged;
      os << fmt17(t) << ',' << fmt17(v.det.value) << ',' << fmt17(v.det.det.error) << ',';
      if (v.mc)
        os << fmt17(v.mc->p_hat) << ',' << fmt17(v.mc->std_error) << ',';
      else
        os << ",,";
      if (v.master)
        os << fmt17(v.master->value) << ',' << fmt17(v.master->error_bound);
      else
        os << ',';
      os << '\n';
    }
    text = os.str();
  } else {
    json rep;
    rep["inputs"] = kolmo::cli::echo_config(cfg);
    json rows = json::array();
    for (double t : cfg.t_grid) {
      const route_values v = evaluate_routes(cfg, t, cross_check);
      converged = converged && v.det.det.converged;
      rows.push_back(routes_to_json(t, v));
    }
    rep["results"] = rows;
    text = rep.dump(2);
  }
  emit(text, out_path);
  return converged ? exit_ok : exit_no_convergence;
}

int cmd_mc(const run_config& cfg, const std::string& format, const std::string& out_path) {
  json rep;
  rep["inputs"] = kolmo::cli::echo_config(cfg);
  json rows = json::array();
  std::ostringstream os;
  os << "t,F_mc,F_mc_stderr\n";
  for (double t : cfg.t_grid) {
    const auto r = kolmo::oracle::mc_estimate(t, cfg.initial(), cfg.spec(), cfg.rates(), cfg.mc);
    json j;
    j["t"] = t;
    j["F_mc"] = r.p_hat;
    j["F_mc_stderr"] = r.std_error;
    j["samples"] = r.samples;
    j["seed"] = r.seed;
    rows.push_back(j);
    os << fmt17(t) << ',' << fmt17(r.p_hat) << ',' << fmt17(r.std_error) << '\n';
  }
  rep["results"] = rows;
  emit(format == "csv" ? os.str() : rep.dump(2), out_path);
  return exit_ok;
}

int cmd_oracle(const run_config& cfg, const std::string& format, const std::string& out_path) {
  json rep;
  rep["inputs"] = kolmo::cli::echo_config(cfg);
  json rows = json::array();
  std::ostringstream os;
  os << "t,F_oracle,oracle_bound,F_schutz,schutz_tail\n";
  for (double t : cfg.t_grid) {
    kolmo::oracle::master_config mcfg;
    mcfg.epsilon = cfg.oracle_epsilon;
    const auto m = kolmo::oracle::master_equation(t, cfg.initial(), cfg.spec(), cfg.rates(), mcfg);
    json j;
    j["t"] = t;
    j["F_oracle"] = m.value;
    j["F_oracle_bound"] = m.error_bound;
    j["states"] = m.states;
    j["iterations"] = m.iterations;
    os << fmt17(t) << ',' << fmt17(m.value) << ',' << fmt17(m.error_bound) << ',';
    if (cfg.rates().r == 1.0 && cfg.rates().l == 0.0) {
      const auto s = kolmo::oracle::schutz_F(t, cfg.initial(), cfg.spec(), cfg.oracle_cap);
      j["F_schutz"] = s.value;
      j["F_schutz_tail"] = s.tail_bound;
      j["schutz_terms"] = s.terms;
      os << fmt17(s.value) << ',' << fmt17(s.tail_bound);
    } else {
      os << ',';
    }
    os << '\n';
    rows.push_back(j);
  }
  rep["results"] = rows;
  emit(format == "csv" ? os.str() : rep.dump(2), out_path);
  return exit_ok;
}

int cmd_verify(const run_config& cfg, const std::string& suite, const std::string& out_path) {
  using kolmo::verify::check_report;
  std::vector<check_report> checks;
  const auto X0 = cfg.initial();
  const auto spec = cfg.spec();
  const double t = cfg.t_grid.front();

  const bool want_all = suite == "all";
  if (suite != "all" && suite != "kolmogorov" && suite != "identities" && suite != "initial" &&
      suite != "push")
    throw kolmo::cli::config_error("unknown suite: " + suite +
                                   " (expected kolmogorov|identities|initial|push|all)");

  if (want_all || suite == "kolmogorov") {
    const double tt = t > 0.0 ? t : 1.0;
    auto ks = kolmo::verify::kolmogorov_checks(tt, X0, spec, cfg.rates(), cfg.window,
                                               cfg.variant());
    checks.insert(checks.end(), ks.begin(), ks.end());
  }
  if (want_all || suite == "identities") {
    auto is = kolmo::verify::identity_suite_tasep(X0, t > 0.0 ? t : 1.0, spec, cfg.window);
    checks.insert(checks.end(), is.begin(), is.end());
  }
  if (want_all || suite == "push") {
    kolmo::rate_params pr = cfg.rates();
    if (pr.l == 0.0) pr = {1.0, 1.0};
    auto ps = kolmo::verify::identity_suite_push(X0, t > 0.0 ? t : 1.0, spec, cfg.window, pr);
    checks.insert(checks.end(), ps.begin(), ps.end());
  }
  if (want_all || suite == "initial") {
    auto ic = kolmo::verify::initial_condition_suite(X0, spec, cfg.window);
    checks.insert(checks.end(), ic.begin(), ic.end());
  }

  json rep;
  rep["inputs"] = kolmo::cli::echo_config(cfg);
  rep["suite"] = suite;
  json rows = json::array();
  for (const auto& c : checks) rows.push_back(check_to_json(c));
  rep["checks"] = rows;
  const bool ok = kolmo::verify::all_passed(checks);
  rep["all_passed"] = ok;
  emit(rep.dump(2), out_path);
  return ok ? exit_ok : exit_check_failed;
}

int cmd_sweep(const run_config& cfg, const std::string& out_path) {
  if (cfg.t_grid.size() < 2)
    throw kolmo::cli::config_error("sweep needs a grid of at least 2 times");
  std::ostringstream os;
  os << "t,F_det,F_det_err,F_mc,F_mc_stderr,F_oracle,oracle_bound,kolmogorov_residual\n";
  bool converged = true;
  for (double t : cfg.t_grid) {
    const route_values v = evaluate_routes(cfg, t, true);
    converged = converged && v.det.det.converged;
    double resid = 0.0;
    if (t > 0.0) {
      const auto kr = kolmo::verify::kolmogorov_residual(t, cfg.initial(), cfg.spec(),
                                                         cfg.rates(), cfg.window, cfg.variant());
      resid = kr.resid_fd;
    }
    os << fmt17(t) << ',' << fmt17(v.det.value) << ',' << fmt17(v.det.det.error) << ','
       << fmt17(v.mc->p_hat) << ',' << fmt17(v.mc->std_error) << ',' << fmt17(v.master->value)
       << ',' << fmt17(v.master->error_bound) << ',' << fmt17(resid) << '\n';
  }
  emit(os.str(), out_path);
  return converged ? exit_ok : exit_no_convergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact determinant solution of the particle-system backward equation"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json", suite = "all";
  std::optional<std::uint64_t> seed_override;
  std::optional<long> samples_override;
  bool cross_check = false;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_path, "write the report here instead of stdout");
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", seed_override, "Monte Carlo seed override");
  app.add_option("--samples", samples_override, "Monte Carlo sample-count override");
  app.add_flag("--cross-check", cross_check, "also run the stochastic and enumerative routes");
  app.add_option("--suite", suite, "verification suite (verify only)");

  auto* c_compute = app.add_subcommand("compute", "evaluate F_t by window-refined determinants");
  auto* c_verify = app.add_subcommand("verify", "run the identity/residual check suites");
  auto* c_mc = app.add_subcommand("mc", "Monte Carlo estimate only");
  auto* c_oracle = app.add_subcommand("oracle", "master-equation and determinant-sum routes");
  auto* c_sweep = app.add_subcommand("sweep", "CSV over a grid of times with all routes");
  // the shared options above are written after the subcommand name
  for (CLI::App* sc : {c_compute, c_verify, c_mc, c_oracle, c_sweep}) sc->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return exit_usage;
  }

  try {
    run_config cfg = load_config(config_path);
    if (seed_override) cfg.mc.seed = *seed_override;
    if (samples_override) cfg.mc.samples = *samples_override;

    if (c_compute->parsed()) return cmd_compute(cfg, cross_check, format, out_path);
    if (c_verify->parsed()) return cmd_verify(cfg, suite, out_path);
    if (c_mc->parsed()) return cmd_mc(cfg, format, out_path);
    if (c_oracle->parsed()) return cmd_oracle(cfg, format, out_path);
    if (c_sweep->parsed()) return cmd_sweep(cfg, out_path);
    return exit_usage;
  } catch (const kolmo::cli::config_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const kolmo::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return exit_no_convergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  }
}
