#pragma once

// Run configuration for the command-line tools: a single JSON document with
// every default embedded, echoed back into reports so runs are reproducible
// from their own output.

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "kolmo/fredholm.hpp"
#include "kolmo/monte_carlo.hpp"
#include "kolmo/types.hpp"

namespace kolmo::cli {

using json = nlohmann::ordered_json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct run_config {
  std::string model = "tasep";
  double r = 1.0;
  double l = 0.0;
  std::vector<site_t> x0 = {-1, -2, -3};
  std::vector<int> n = {1, 3};
  std::vector<site_t> a = {0, -3};
  std::vector<double> t_grid = {1.0};
  fredholm::window_plan window;
  oracle::mc_config mc;
  site_t oracle_cap = 25;
  double oracle_epsilon = 1e-10;

  rate_params rates() const { return {r, l}; }
  particle_config initial() const { return particle_config(x0); }
  observation_spec spec() const {
    observation_spec s;
    s.indices = n;
    s.levels = a;
    return s;
  }
  fredholm::model variant() const {
    return model == "tasep" ? fredholm::model::tasep : fredholm::model::pushasep;
  }

  void validate() const {
    if (model != "tasep" && model != "pushasep")
      throw config_error("model must be \"tasep\" or \"pushasep\"");
    if (model == "tasep" && (r != 1.0 || l != 0.0))
      throw config_error("model \"tasep\" forces rates r=1, l=0");
    if (n.size() != a.size()) throw config_error("n and a must have equal length");
    if (t_grid.empty()) throw config_error("at least one time required");
    for (double t : t_grid)
      if (t < 0.0) throw config_error("times must be >= 0");
    try {
      rates().validate();
      spec().validate(initial().size());
    } catch (const std::exception& e) {
      throw config_error(e.what());
    }
  }
};

namespace detail {

template <class T>
void read_into(const json& j, const char* key, T& slot) {
  if (j.contains(key)) slot = j.at(key).get<T>();
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known,
                           const std::string& where) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw config_error("unknown key \"" + key + "\" in " + where);
  }
}

}  // namespace detail

inline run_config parse_config(const json& j) {
  run_config c;
  detail::reject_unknown(j, {"model", "r", "l", "x0", "n", "a", "t", "window", "mc", "oracle"},
                         "config");
  detail::read_into(j, "model", c.model);
  if (c.model == "pushasep") {  // push defaults; explicit keys still win
    c.r = 1.0;
    c.l = 1.0;
  }
  detail::read_into(j, "r", c.r);
  detail::read_into(j, "l", c.l);
  detail::read_into(j, "x0", c.x0);
  detail::read_into(j, "n", c.n);
  detail::read_into(j, "a", c.a);
  if (j.contains("t")) {
    const auto& t = j.at("t");
    if (t.is_array())
      c.t_grid = t.get<std::vector<double>>();
    else
      c.t_grid = {t.get<double>()};
  }
  if (j.contains("window")) {
    const auto& w = j.at("window");
    detail::reject_unknown(w, {"depth", "growth", "tol", "max_depth"}, "window");
    detail::read_into(w, "depth", c.window.depth);
    detail::read_into(w, "growth", c.window.growth);
    detail::read_into(w, "tol", c.window.tol);
    detail::read_into(w, "max_depth", c.window.max_depth);
  }
  if (j.contains("mc")) {
    const auto& m = j.at("mc");
    detail::reject_unknown(m, {"samples", "seed"}, "mc");
    detail::read_into(m, "samples", c.mc.samples);
    detail::read_into(m, "seed", c.mc.seed);
  }
  if (j.contains("oracle")) {
    const auto& o = j.at("oracle");
    detail::reject_unknown(o, {"cap", "epsilon"}, "oracle");
    detail::read_into(o, "cap", c.oracle_cap);
    detail::read_into(o, "epsilon", c.oracle_epsilon);
  }
  c.validate();
  return c;
}

inline json echo_config(const run_config& c) {
  json j;
  j["model"] = c.model;
  j["r"] = c.r;
  j["l"] = c.l;
  j["x0"] = c.x0;
  j["n"] = c.n;
  j["a"] = c.a;
  j["t"] = c.t_grid;
  j["window"] = {{"depth", c.window.depth},
                 {"growth", c.window.growth},
                 {"tol", c.window.tol},
                 {"max_depth", c.window.max_depth}};
  j["mc"] = {{"samples", c.mc.samples}, {"seed", c.mc.seed}};
  j["oracle"] = {{"cap", c.oracle_cap}, {"epsilon", c.oracle_epsilon}};
  return j;
}

}  // namespace kolmo::cli
