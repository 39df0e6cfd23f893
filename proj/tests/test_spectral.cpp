#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/SVD>

#include "grpavg/averaging.hpp"
#include "grpavg/models.hpp"
#include "grpavg/spectral.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

namespace {

MarkovKernel two_state(double a, double b) { return MarkovKernel(rows({{1 - a, a}, {b, 1 - b}})); }

Distribution two_state_pi(double a, double b) { return Distribution(Vector{{b / (a + b), a / (a + b)}}); }

// 1 - largest singular value of D^{1/2} P D^{-1/2} - sqrt(pi) sqrt(pi)^T.
double gamma_oracle(const MarkovKernel& p, const Distribution& pi) {
  const Vector s = pi.weights().cwiseSqrt();
  const Matrix w = s.asDiagonal() * p.matrix() * s.cwiseInverse().asDiagonal() - s * s.transpose();
  return 1.0 - Eigen::JacobiSVD<Matrix>(w).singularValues()[0];
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("two-state gaps") {
  for (double a : {0.1, 0.4, 0.9})
    for (double b : {0.2, 0.5, 0.95}) {
      const auto r = spectral_report(two_state(a, b), two_state_pi(a, b));
      CHECK(r.lambda == doctest::Approx(a + b).epsilon(1e-12));
      CHECK(r.gamma == doctest::Approx(1 - std::abs(1 - a - b)).epsilon(1e-12));
    }
}

TEST_CASE("lazy cycle spectrum") {
  for (int n : {5, 8, 13}) {
    const NamedModel m = named_model("srw-cycle", {.n = n, .lazy = true});
    const auto r = spectral_report(m.kernel, m.pi);
    CHECK(r.lambda == doctest::Approx((1 - std::cos(2 * std::numbers::pi / n)) / 2).epsilon(1e-12));
    CHECK(r.lambda2 == doctest::Approx((1 - std::cos(4 * std::numbers::pi / n)) / 2).epsilon(1e-12));
    REQUIRE(r.eigvals.size() == static_cast<std::size_t>(n));
    CHECK(std::abs(r.eigvals.front()) < 1e-12);
  }
}

TEST_CASE("gamma equals an SVD oracle for non-reversible kernels") {
  Rng rng(7);
  for (int t = 0; t < 30; ++t) {
    const Distribution pi = random_distribution(rng, 3 + t % 6);
    const MarkovKernel p = random_stationary(rng, pi);
    const auto r = spectral_report(p, pi);
    CHECK(r.gamma == doctest::Approx(gamma_oracle(p, pi)).epsilon(1e-10));
    CHECK(r.lambda >= r.gamma - 1e-12);
    CHECK(r.gamma2 >= r.gamma - 1e-12);
    CHECK(r.lambda2 >= r.lambda - 1e-12);
  }
}

TEST_CASE("centered basis is orthonormal and orthogonal to sqrt(pi)") {
  Rng rng(8);
  const Distribution pi = random_distribution(rng, 7);
  const Matrix b = centered_basis(pi);
  CHECK(b.cols() == 6);
  CHECK(max_abs(b.transpose() * b - Matrix::Identity(6, 6)) < 1e-12);
  CHECK((b.transpose() * pi.weights().cwiseSqrt()).cwiseAbs().maxCoeff() < 1e-12);
  const Matrix c = orthogonal_complement(b);
  CHECK(c.cols() == 1);
}

TEST_CASE("invariant bases") {
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 6}));
  const auto bases = invariant_basis(g, Distribution::uniform(6));
  CHECK(bases.V.dim() == 3);
  CHECK(bases.V_prime.dim() == 2);
  CHECK(bases.V_perp.dim() == 3);
  const Matrix pv = bases.V.projector(Distribution::uniform(6));
  CHECK(max_abs(pv * pv - pv) < 1e-12);
}

TEST_CASE("gap eigenspace multiplicity on the cycle") {
  const NamedModel m = named_model("srw-cycle", {.n = 8, .lazy = true});
  CHECK(gap_eigenspace(m.kernel, m.pi, GapSpace::W).dim() == 2);
}

TEST_CASE("orbit gap bound is a lower bound") {
  Rng rng(9);
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 6}));
  for (int t = 0; t < 20; ++t) {
    Vector w(6);
    for (int i = 0; i < 3; ++i) w[i] = w[5 - i] = rng.uniform(0.2, 1.2);
    const Distribution pi = Distribution::normalized(w);
    const MarkovKernel p = random_reversible(rng, pi);
    const OrbitGapBound b = overline_gap_bound(p, g, pi);
    const double actual = spectral_report(special_average(p, g, AverageKind::orbit, pi), pi).lambda;
    CHECK(b.bound >= b.lambda - 1e-10);
    CHECK(actual >= b.bound - 1e-9);
  }
}

TEST_CASE("gamma bounds of the left and right averages") {
  Rng rng(10);
  const FiniteGroup g = close_generators(named_group("shift", {.n = 5}));
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = Distribution::uniform(5);
    const MarkovKernel p = random_stationary(rng, pi);
    const GammaBounds b = gamma_bounds_la_ra(p, g, pi);
    CHECK(spectral_report(special_average(p, g, AverageKind::left, pi), pi).gamma >= b.bound_la - 1e-9);
    CHECK(spectral_report(special_average(p, g, AverageKind::right, pi), pi).gamma >= b.bound_ra - 1e-9);
  }
}

}
