#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "grpavg/group.hpp"
#include "grpavg/models.hpp"
#include "grpavg/state.hpp"

namespace testing {

using grpavg::Distribution;
using grpavg::MarkovKernel;
using grpavg::Matrix;
using grpavg::Perm;
using grpavg::Vector;

struct Rng {
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng); }
  std::mt19937_64 eng;
};

inline Distribution random_distribution(Rng& rng, std::size_t n) {
  Vector w(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = rng.uniform(0.2, 1.2);
  return Distribution::normalized(w);
}

inline MarkovKernel random_kernel(Rng& rng, std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  Matrix m(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = rng.uniform(0.05, 1.0);
    m.row(i) /= m.row(i).sum();
  }
  return MarkovKernel(std::move(m));
}

inline MarkovKernel random_reversible(Rng& rng, const Distribution& pi) {
  return grpavg::metropolis_hastings(random_kernel(rng, pi.size()), pi);
}

/// Stationary for pi and generally non-reversible.
inline MarkovKernel random_stationary(Rng& rng, const Distribution& pi) {
  return grpavg::compose(random_reversible(rng, pi), random_reversible(rng, pi));
}

inline Perm random_perm(Rng& rng, std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  std::shuffle(m.begin(), m.end(), rng.eng);
  return Perm(std::move(m));
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

} // namespace testing
