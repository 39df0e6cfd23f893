#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "grpavg/error.hpp"
#include "grpavg/state.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

TEST_SUITE("state") {

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(Distribution(Vector{{0.25, 0.75}}));
  CHECK_THROWS_AS(Distribution(Vector{{0.5, 0.6}}), Error);
  CHECK_THROWS_AS(Distribution(Vector{{1.2, -0.2}}), Error);
  const Distribution u = Distribution::uniform(4);
  CHECK(u[3] == doctest::Approx(0.25));
  CHECK(u.strictly_positive());
  const Distribution z(Vector{{0.0, 1.0}});
  CHECK_FALSE(z.strictly_positive());
  CHECK_THROWS_AS(z.require_positive("op"), DomainError);
}

TEST_CASE("kernel rows must sum to one") {
  CHECK_THROWS_AS(MarkovKernel(rows({{0.5, 0.49}, {0.5, 0.5}})), Error);
  CHECK_THROWS_AS(MarkovKernel(rows({{1.5, -0.5}, {0.5, 0.5}})), Error);
  CHECK_THROWS_AS(MarkovKernel(Matrix::Ones(2, 3) / 3.0), Error);
  const MarkovKernel k(rows({{1.0 + 1e-15, -1e-15}, {0.5, 0.5}}));
  CHECK(k(0, 1) == 0.0);
}

TEST_CASE("certification requires stationarity") {
  const MarkovKernel p(rows({{0.9, 0.1}, {0.2, 0.8}}));
  const Distribution pi(Vector{{2.0 / 3, 1.0 / 3}});
  CHECK(p.certified(pi).stationary_verified());
  CHECK_THROWS_AS(p.certified(Distribution::uniform(2)), DomainError);
}

TEST_CASE("adjoint is an involution and fixes reversible kernels") {
  Rng rng(11);
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = random_distribution(rng, 3 + t % 5);
    const MarkovKernel p = random_stationary(rng, pi);
    const MarkovKernel a = adjoint(p, pi);
    CHECK(max_abs(adjoint(a, pi).matrix() - p.matrix()) < 1e-12);
    CHECK(is_stationary(a, pi));
    const MarkovKernel r = random_reversible(rng, pi);
    CHECK(is_reversible(r, pi));
    CHECK(max_abs(adjoint(r, pi).matrix() - r.matrix()) < 1e-12);
  }
}

TEST_CASE("lazy version keeps stationarity and has nonnegative spectrum") {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = random_distribution(rng, 4 + t % 4);
    const MarkovKernel l = lazy(random_reversible(rng, pi));
    CHECK(is_reversible(l, pi));
    const Vector s = pi.weights().cwiseSqrt();
    const Matrix sym = s.asDiagonal() * l.matrix() * s.cwiseInverse().asDiagonal();
    const Vector ev = Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (sym + sym.transpose())).eigenvalues();
    CHECK(ev.minCoeff() >= -1e-12);
    CHECK(ev.maxCoeff() <= 1.0 + 1e-12);
  }
}

TEST_CASE("compose, mixture and projector") {
  const MarkovKernel a(rows({{0.0, 1.0}, {1.0, 0.0}}));
  CHECK(max_abs(compose(a, a).matrix() - Matrix::Identity(2, 2)) == 0.0);
  const MarkovKernel m = mixture({0.25, 0.75}, {a, MarkovKernel::identity(2)});
  CHECK(m(0, 0) == doctest::Approx(0.75));
  const Distribution pi(Vector{{0.1, 0.9}});
  const MarkovKernel pr = stationary_projector(pi);
  CHECK(pr(1, 0) == doctest::Approx(0.1));
  CHECK(is_stationary(pr, pi));
  CHECK_THROWS_AS(compose(a, MarkovKernel::identity(3)), DimensionError);
}

TEST_CASE("weighted inner product and product index") {
  const Distribution pi(Vector{{0.2, 0.8}});
  CHECK(weighted_inner(ObsFunction{1.0, 2.0}, ObsFunction{3.0, -1.0}, pi) == doctest::Approx(0.2 * 3 - 0.8 * 2));
  const ProductIndex idx{3, 4};
  for (std::size_t x = 0; x < 3; ++x)
    for (std::size_t a = 0; a < 4; ++a) CHECK(idx.decode(idx.encode(x, a)) == std::pair{x, a});
  CHECK(idx.size() == 12);
}

TEST_CASE("state space labels") {
  const StateSpace s = StateSpace::signed_range(2);
  CHECK(s.size() == 5);
  CHECK(s.label(0) == "-2");
  CHECK(s.label(4) == "2");
}

}
