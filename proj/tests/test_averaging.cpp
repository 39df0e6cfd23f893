#include <doctest.h>

#include "grpavg/averaging.hpp"
#include "grpavg/error.hpp"
#include "grpavg/models.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

namespace {

const Matrix three_state = rows({{0.09, 0.5, 0.41}, {0.5, 0.12, 0.38}, {0.41, 0.38, 0.21}});

FiniteGroup swap12() { return close_generators({Perm::from_cycles(3, {{1, 2}})}); }

} // namespace

TEST_SUITE("averaging") {

TEST_CASE("sandwich entries") {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const MarkovKernel p = random_kernel(rng, 5);
    const Perm g = random_perm(rng, 5), h = random_perm(rng, 5);
    const MarkovKernel s = sandwich(p, g, h);
    const Perm hi = h.inverse();
    for (std::size_t x = 0; x < 5; ++x)
      for (std::size_t y = 0; y < 5; ++y) CHECK(s(x, y) == doctest::Approx(p(g[x], hi[y])).epsilon(1e-14));
    const Matrix via = perm_kernel(g).matrix() * p.matrix() * perm_kernel(h).matrix();
    CHECK(max_abs(via - s.matrix()) < 1e-15);
  }
}

TEST_CASE("three-state averages") {
  const MarkovKernel p(three_state);
  const Distribution u = Distribution::uniform(3);
  const FiniteGroup g = swap12();
  const MarkovKernel orbit = special_average(p, g, AverageKind::orbit, u);
  const Matrix expected_orbit = rows({{0.09, 0.455, 0.455}, {0.455, 0.165, 0.38}, {0.455, 0.38, 0.165}});
  CHECK(max_abs(orbit.matrix() - expected_orbit) < 1e-15);
  const MarkovKernel la = special_average(p, g, AverageKind::left, u);
  const MarkovKernel lara = special_average(la, g, AverageKind::right, u);
  const Matrix expected_lara = rows({{0.09, 0.455, 0.455}, {0.455, 0.2725, 0.2725}, {0.455, 0.2725, 0.2725}});
  CHECK(max_abs(lara.matrix() - expected_lara) < 1e-15);
  CHECK(max_abs(special_average(p, g, AverageKind::independent, u).matrix() - expected_lara) < 1e-15);
}

TEST_CASE("non-invariant targets are rejected") {
  const MarkovKernel p(three_state);
  CHECK_THROWS_AS(special_average(p, swap12(), AverageKind::orbit, Distribution(Vector{{0.2, 0.3, 0.5}})), DomainError);
}

TEST_CASE("left and right averages land in the invariant classes") {
  Rng rng(4);
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 6}));
  for (int t = 0; t < 10; ++t) {
    Vector w(6);
    for (int i = 0; i < 3; ++i) w[i] = w[5 - i] = rng.uniform(0.2, 1.2);
    const Distribution pi = Distribution::normalized(w);
    const MarkovKernel p = random_stationary(rng, pi);
    CHECK(invariance_class(special_average(p, g, AverageKind::left, pi), g, pi).in_LI);
    CHECK(invariance_class(special_average(p, g, AverageKind::right, pi), g, pi).in_RI);
    CHECK(invariance_class(special_average(p, g, AverageKind::orbit, pi), g, pi).in_LGGinv);
    CHECK(is_stationary(special_average(p, g, AverageKind::twisted, pi), pi));
  }
}

TEST_CASE("state-dependent Q is a pi-orthogonal projector") {
  Rng rng(5);
  const FiniteGroup g = close_generators(named_group("shift", {.n = 5}));
  for (int t = 0; t < 10; ++t) {
    const Distribution pi = random_distribution(rng, 5);
    const MarkovKernel q = state_dependent_Q(g, pi);
    CHECK(max_abs(q.matrix() * q.matrix() - q.matrix()) < 1e-14);
    CHECK(is_reversible(q, pi, 1e-14));
    // Transitive action: Q is the stationary projector.
    CHECK(max_abs(q.matrix() - stationary_projector(pi).matrix()) < 1e-14);
    const MarkovKernel p = random_stationary(rng, pi);
    CHECK(max_abs(sd_average(p, g, pi, Side::left).matrix() - q.matrix() * p.matrix()) < 1e-15);
  }
}

TEST_CASE("state-dependent Q for the frobenius example") {
  const Distribution pi(Vector{{0.2, 0.5, 0.3}});
  const MarkovKernel q = state_dependent_Q(swap12(), pi);
  const Matrix expected = rows({{1, 0, 0}, {0, 0.625, 0.375}, {0, 0.625, 0.375}});
  CHECK(max_abs(q.matrix() - expected) < 1e-15);
}

TEST_CASE("zero-mass policies") {
  const Distribution pi(Vector{{0.0, 0.5, 0.5}});
  const FiniteGroup g = swap12();
  CHECK_THROWS_AS(state_dependent_Q(g, pi), DomainError);
  const Distribution zero_orbit(Vector{{1.0, 0.0, 0.0}});
  CHECK_THROWS_AS(state_dependent_Q(g, zero_orbit, ZeroMass::allow_positive_orbit), DomainError);
  const MarkovKernel q = state_dependent_Q(g, zero_orbit, ZeroMass::uniform_null_orbit);
  CHECK(q(1, 1) == doctest::Approx(0.5));
  CHECK(q(1, 2) == doctest::Approx(0.5));
}

TEST_CASE("Metropolis averaging kernel and extended target") {
  Rng rng(6);
  const FiniteGroup g = close_generators(named_group("shift", {.n = 4}));
  const Distribution pi = random_distribution(rng, 4);
  const Distribution ext = extended_target(g, pi);
  CHECK(ext.size() == 16);
  const MarkovKernel m = metropolis_average_kernel(g, pi);
  CHECK(is_reversible(m, ext));
  for (std::size_t x = 0; x < 4; ++x)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t y = 0; y < 4; ++y)
        if (y != x) CHECK(m(x * 4 + a, y * 4 + a) == 0.0);
}

TEST_CASE("names round trip") {
  for (AverageKind k : {AverageKind::orbit, AverageKind::twisted, AverageKind::left, AverageKind::right,
                        AverageKind::independent})
    CHECK(average_kind_from_string(to_string(k)) == k);
  CHECK_THROWS(average_kind_from_string("bogus"));
}

}
