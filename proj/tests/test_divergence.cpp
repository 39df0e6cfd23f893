#include <doctest.h>

#include <cmath>
#include <limits>

#include "grpavg/averaging.hpp"
#include "grpavg/divergence.hpp"
#include "grpavg/error.hpp"
#include "grpavg/models.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

namespace {

double hs2_oracle(const Matrix& a, const Distribution& pi) {
  double s = 0.0;
  for (Eigen::Index x = 0; x < a.rows(); ++x)
    for (Eigen::Index y = 0; y < a.cols(); ++y) s += pi.weights()[x] * a(x, y) * a(x, y) / pi.weights()[y];
  return s;
}

} // namespace

TEST_SUITE("divergence") {

TEST_CASE("KL between kernels") {
  Rng rng(13);
  const Distribution pi = random_distribution(rng, 4);
  const MarkovKernel p = random_kernel(rng, 4), m = random_kernel(rng, 4);
  CHECK(kl_pi(p, p, pi) == doctest::Approx(0.0));
  CHECK(kl_pi(p, m, pi) > 0.0);
  const MarkovKernel id = MarkovKernel::identity(4);
  CHECK(kl_pi(id, p, pi) == doctest::Approx(-(pi.weights().array() * p.matrix().diagonal().array().log()).sum()));
  CHECK(std::isinf(kl_pi(p, id, pi)));
  CHECK(kl_pi(id, id, pi) == 0.0);
}

TEST_CASE("Hilbert-Schmidt norm") {
  Rng rng(14);
  const Distribution pi = random_distribution(rng, 5);
  const MarkovKernel p = random_kernel(rng, 5), m = random_kernel(rng, 5);
  CHECK(hs_norm_squared(p.matrix(), pi) == doctest::Approx(hs2_oracle(p.matrix(), pi)).epsilon(1e-13));
  CHECK(hs_norm(stationary_projector(pi), pi) == doctest::Approx(1.0));
  CHECK(hs_dist(p, m, pi) == doctest::Approx(std::sqrt(hs2_oracle(p.matrix() - m.matrix(), pi))));
  CHECK(trace_pi(MarkovKernel::identity(5)) == 5.0);
}

TEST_CASE("frobenius distance of the first counterexample") {
  const MarkovKernel p(rows({{0.6, 0.3, 0.1}, {0.2, 0.7, 0.1}, {0.1, 0.3, 0.6}}));
  const MarkovKernel m(rows({{1, 0, 0}, {0, 0.625, 0.375}, {0, 0.625, 0.375}}));
  double s = 0.0;
  for (Eigen::Index i = 0; i < 9; ++i) s += std::pow(p.matrix().data()[i] - m.matrix().data()[i], 2);
  CHECK(frob_dist(p, m) == doctest::Approx(std::sqrt(s)));
}

TEST_CASE("Pythagorean identity for the left and right classes") {
  Rng rng(15);
  const FiniteGroup g = close_generators(named_group("shift", {.n = 5}));
  const Distribution pi = Distribution::uniform(5);
  for (int t = 0; t < 20; ++t) {
    const MarkovKernel p = random_stationary(rng, pi);
    const MarkovKernel m = special_average(random_stationary(rng, pi), g, AverageKind::left, pi);
    const MarkovKernel avg = special_average(p, g, AverageKind::left, pi);
    for (Metric metric : {Metric::KL, Metric::HS2}) {
      const auto c = pythagorean_check(p, m, avg, pi, metric, g, TargetClass::LI);
      CHECK(std::abs(c.residual) < 1e-10);
    }
  }
}

TEST_CASE("Pythagorean hypotheses are enforced") {
  Rng rng(16);
  const FiniteGroup g = close_generators(named_group("shift", {.n = 4}));
  const Distribution pi = Distribution::uniform(4);
  const MarkovKernel p = random_stationary(rng, pi), m = random_stationary(rng, pi);
  CHECK_THROWS_AS(pythagorean_check(p, m, p, pi, Metric::KL, g, TargetClass::LI), DomainError);
}

TEST_CASE("state-dependent Pythagorean identity") {
  Rng rng(17);
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 5}));
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = random_distribution(rng, 5);
    const MarkovKernel p = random_stationary(rng, pi);
    const MarkovKernel m = sd_average(random_stationary(rng, pi), g, pi, Side::left);
    const auto c = sd_pythagorean_check(p, m, sd_average(p, g, pi, Side::left), pi, Metric::KL, g, TargetClass::LI);
    CHECK(std::abs(c.residual) < 1e-10);
  }
}

TEST_CASE("symmetrized target and classical KL") {
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 4}));
  const Distribution pi(Vector{{0.1, 0.2, 0.3, 0.4}});
  const Distribution pg = pi_G(pi, g);
  CHECK(pg[0] == doctest::Approx(0.25));
  CHECK(pg[1] == doctest::Approx(0.25));
  CHECK(is_pi_invariant(g, pg));
  const double kl = kl_dist(pi, pg);
  double oracle = 0.0;
  for (std::size_t x = 0; x < 4; ++x) oracle += pi[x] * std::log(pi[x] / pg[x]);
  CHECK(kl == doctest::Approx(oracle));
  CHECK(kl >= 0.0);
  CHECK(required_sample_size(pi, pg) == doctest::Approx(std::exp(oracle)));
  CHECK(std::isinf(kl_dist(pi, Distribution(Vector{{0.0, 0.5, 0.5, 0.0}}))));
}

TEST_CASE("distance to isotropy vanishes for orbit averages") {
  Rng rng(18);
  const FiniteGroup g = close_generators(named_group("shift", {.n = 4}));
  const Distribution pi = Distribution::uniform(4);
  const MarkovKernel p = random_stationary(rng, pi);
  CHECK(distance_to_isotropy(special_average(p, g, AverageKind::orbit, pi), g, pi) == doctest::Approx(0.0));
  CHECK(distance_to_isotropy(p, g, pi) > 0.0);
}

}
