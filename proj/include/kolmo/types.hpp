#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace kolmo {

// Lattice site. Signed; configurations live anywhere on Z.
using site_t = long;

// Thrown when an iterative scheme fails to meet its tolerance within its cap
// (quadrature node doubling, series truncation, window growth).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Jump rates: `r` right jumps, `l` left (pushing) jumps.  TASEP is (1,0).
struct rate_params {
  double r = 1.0;
  double l = 0.0;

  bool pure_right() const { return l == 0.0; }

  void validate() const {
    if (r < 0.0 || l < 0.0 || r + l <= 0.0)
      throw std::invalid_argument("rate_params: need r,l >= 0 and r+l > 0");
  }
};

// Strictly decreasing particle positions X(1) > X(2) > ... > X(N), indexed
// from 1 as is conventional for ordered configurations.
class particle_config {
 public:
  particle_config() = default;

  explicit particle_config(std::vector<site_t> pos) : pos_(std::move(pos)) {
    for (std::size_t i = 1; i < pos_.size(); ++i)
      if (pos_[i - 1] <= pos_[i])
        throw std::invalid_argument("particle_config: positions must strictly decrease");
  }

  int size() const { return static_cast<int>(pos_.size()); }

  site_t at(int k) const {  // 1-based
    if (k < 1 || k > size()) throw std::out_of_range("particle_config::at");
    return pos_[static_cast<std::size_t>(k - 1)];
  }

  const std::vector<site_t>& positions() const { return pos_; }

  // Thresholds (X(1),...,X(n)) seen by the hitting walk.
  std::vector<site_t> curve(int n) const {
    if (n < 1 || n > size()) throw std::out_of_range("particle_config::curve");
    return std::vector<site_t>(pos_.begin(), pos_.begin() + n);
  }

  particle_config prefix(int n) const { return particle_config(curve(n)); }

  bool operator==(const particle_config& o) const { return pos_ == o.pos_; }

 private:
  std::vector<site_t> pos_;
};

// Observation levels: asks for P(X_t(n_j) > a_j, j = 1..m) with the indices
// n_1 < ... < n_m.
struct observation_spec {
  std::vector<int> indices;   // n_j, strictly increasing, >= 1
  std::vector<site_t> levels; // a_j

  int m() const { return static_cast<int>(indices.size()); }
  int max_index() const { return indices.empty() ? 0 : indices.back(); }

  void validate(int n_particles) const {
    if (indices.empty() || indices.size() != levels.size())
      throw std::invalid_argument("observation_spec: need matching nonempty indices/levels");
    for (std::size_t j = 0; j < indices.size(); ++j) {
      if (indices[j] < 1)
        throw std::invalid_argument("observation_spec: indices start at 1");
      if (j > 0 && indices[j - 1] >= indices[j])
        throw std::invalid_argument("observation_spec: indices must strictly increase");
    }
    if (max_index() > n_particles)
      throw std::invalid_argument("observation_spec: index exceeds configuration length");
  }
};

}  // namespace kolmo
