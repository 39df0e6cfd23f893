#include <doctest.h>

#include <cmath>

#include "grpavg/averaging.hpp"
#include "grpavg/error.hpp"
#include "grpavg/models.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

TEST_SUITE("models") {

TEST_CASE("Gibbs law and partition function") {
  const GibbsSpec s{ObsFunction{0.0, 1.0, 3.0}, 0.7};
  const Distribution pi = gibbs(s);
  const double z = 1 + std::exp(-0.7) + std::exp(-2.1);
  CHECK(pi[1] == doctest::Approx(std::exp(-0.7) / z).epsilon(1e-14));
  CHECK(log_partition(s) == doctest::Approx(std::log(z)).epsilon(1e-14));
  const GibbsSpec big{ObsFunction{-800.0, -801.0}, 1.0};
  CHECK(gibbs(big)[1] == doctest::Approx(std::exp(1.0) / (1 + std::exp(1.0))));
}

TEST_CASE("Metropolis-Hastings detailed balance") {
  Rng rng(24);
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = random_distribution(rng, 3 + t % 7);
    const MarkovKernel q = random_kernel(rng, pi.size());
    const MarkovKernel p = metropolis_hastings(q, pi);
    CHECK(is_reversible(p, pi, 1e-13));
    for (std::size_t x = 0; x < pi.size(); ++x)
      for (std::size_t y = 0; y < pi.size(); ++y)
        if (x != y) CHECK(p(x, y) <= q(x, y) + 1e-15);
  }
}

TEST_CASE("nearest-neighbour proposal") {
  const MarkovKernel q = nearest_neighbour_proposal(4);
  CHECK(q(0, 0) == 0.5);
  CHECK(q(0, 1) == 0.5);
  CHECK(q(1, 0) == 0.5);
  CHECK(q(1, 2) == 0.5);
  CHECK(q(3, 3) == 0.5);
}

TEST_CASE("V-shape model") {
  const ObsFunction h = vshape_hamiltonian(2);
  CHECK(h[0] == -2.0);
  CHECK(h[2] == 0.0);
  CHECK(h[4] == -2.0);
  CHECK(vshape_hamiltonian(2, 0.3)[0] == doctest::Approx(-1.7));
  const NamedModel m = named_model("vshape", {.n = 2, .beta = 1.0});
  CHECK(m.kernel.size() == 5);
  // x = 0 is the unique maximum of H, so both moves away are accepted.
  CHECK(m.kernel(2, 1) == doctest::Approx(0.5));
  CHECK(m.kernel(1, 2) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK(m.kernel(0, 0) == doctest::Approx(0.5 + 0.5 * (1 - std::exp(-1.0))));
  CHECK(is_reversible(m.kernel, m.pi));
  CHECK_THROWS_AS(named_model("vshape-perturbed", {.n = 2, .delta = 0.7}), DomainError);
}

TEST_CASE("DHN kernels") {
  const NamedModel k = named_model("dhn", {.n = 2});
  const Matrix expected = rows({{0, .5, .5, 0}, {0, .5, .5, 0}, {.5, 0, 0, .5}, {.5, 0, 0, .5}});
  CHECK(max_abs(k.kernel.matrix() - expected) < 1e-15);
  for (int n : {3, 5, 8}) {
    const NamedModel m = named_model("dhn", {.n = n});
    CHECK(m.kernel.size() == static_cast<std::size_t>(2 * n));
    CHECK(is_stationary(m.kernel, m.pi));
    CHECK_FALSE(is_reversible(m.kernel, m.pi));
    CHECK(is_stationary(named_model("dhn-right-averaged", {.n = n}).kernel, m.pi));
  }
}

TEST_CASE("block reversals") {
  const Perm s2 = block_reversal(3, 2);
  CHECK(s2.map() == std::vector<std::size_t>{3, 2, 1, 0, 7, 6, 5, 4});
  CHECK(block_reversal(3, 0).is_identity());
  for (int k = 1; k <= 5; ++k) {
    const Perm top = block_reversal(k, k);
    const std::size_t n = std::size_t{1} << k;
    for (std::size_t i = 0; i < n; ++i) CHECK(top[i] == n - 1 - i);
  }
  const PairMeasure nu = block_reversal_measure(3);
  CHECK(nu.atoms().size() == 16);
  CHECK(nu.support_size() == 4);
  CHECK(named_group("block-reversal", {.n = 8}).size() == 4);
  CHECK(is_measure_symmetric(named_group("block-reversal", {.n = 8}), nu));
}

TEST_CASE("named groups") {
  CHECK(named_group("flip", {.n = 3}).front().size() == 7);
  CHECK(close_generators(named_group("mod-mult", {.n = 7, .a = 3})).order() == 6);
  CHECK_THROWS_AS(named_group("mod-mult", {.n = 8, .a = 2}), DomainError);
  CHECK_THROWS_AS(named_group("bogus", {}), DomainError);
  CHECK_THROWS_AS(named_model("bogus", {}), DomainError);
  const Perm f = named_group("power-map", {.n = 11, .a = 1, .k = 3}).front();
  for (std::size_t x = 0; x < 11; ++x) CHECK(f[x] == (x * x * x) % 11);
}

TEST_CASE("CDG kernel") {
  const NamedModel m = named_model("cdg", {.n = 7, .a = 2});
  CHECK(is_stationary(m.kernel, Distribution::uniform(7)));
  for (std::size_t x = 0; x < 7; ++x) CHECK(m.kernel.matrix().row(static_cast<Eigen::Index>(x)).sum() == doctest::Approx(1.0));
}

TEST_CASE("Swendsen-Wang single edge") {
  const double beta = 0.8, p = 1 - std::exp(-beta);
  const SwendsenWangModel sw = swendsen_wang_model({{0, 1}}, 2, beta);
  CHECK(sw.model.base_size() == 4);
  CHECK(sw.model.aux_size() == 2);
  // Spins (0,0) = 0, (1,0) = 1, (0,1) = 2, (1,1) = 3.
  CHECK(sw.sw_oracle(0, 0) == doctest::Approx(p / 2 + (1 - p) / 4));
  CHECK(sw.sw_oracle(0, 3) == doctest::Approx(p / 2 + (1 - p) / 4));
  CHECK(sw.sw_oracle(0, 1) == doctest::Approx((1 - p) / 4));
  CHECK(sw.sw_oracle(1, 2) == doctest::Approx(0.25));
  const double z = 2 + 2 * std::exp(-beta);
  CHECK(sw.potts[1] == doctest::Approx(std::exp(-beta) / z));
  CHECK(sw.group.order() == 4);
  CHECK(sw_marginal_gap(sw) < 1e-10);
  CHECK(is_stationary(sw.bond, sw.model.joint, 1e-12));
}

TEST_CASE("parallel tempering") {
  const ObsFunction h{0.0, 1.0, 0.5};
  const ParallelTemperingModel pt = parallel_tempering_model(h, {1.0, 0.3}, nearest_neighbour_proposal(3));
  CHECK(pt.levels == 2);
  CHECK(pt.model.joint.size() == 18);
  CHECK(max_abs(pt.k.matrix() - pt.direct.matrix()) < 1e-10);
  for (const MarkovKernel* k : {&pt.k1, &pt.k2, &pt.k, &pt.k_symmetric}) CHECK(is_stationary(*k, pt.model.joint, 1e-10));
  CHECK_THROWS_AS(parallel_tempering_model(ObsFunction::constant(9, 0.0), {1.0, 0.5, 0.2, 0.1},
                                           nearest_neighbour_proposal(9)),
                  LimitError);
}

}
