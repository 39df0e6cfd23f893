#include <doctest.h>

#include <cmath>

#include "grpavg/averaging.hpp"
#include "grpavg/dynamics.hpp"
#include "grpavg/error.hpp"
#include "grpavg/models.hpp"
#include "grpavg/spectral.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

namespace {

// First t >= 1 with max_x sum_y |P^t(x,y) - pi(y)| <= eps, by plain
// repeated multiplication.
std::uint64_t naive_tmix_l1(const MarkovKernel& p, const Distribution& pi, double eps) {
  const Matrix target = Vector::Ones(static_cast<Eigen::Index>(pi.size())) * pi.weights().transpose();
  Matrix pt = p.matrix();
  for (std::uint64_t t = 1;; ++t) {
    if ((pt - target).cwiseAbs().rowwise().sum().maxCoeff() <= eps) return t;
    pt = pt * p.matrix();
  }
}

// Minimum over subsets with pi(A) <= 1/2 by direct enumeration.
double naive_cheeger(const MarkovKernel& p, const Distribution& pi) {
  const std::size_t n = pi.size();
  double best = INFINITY;
  for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
    double mass = 0.0, flow = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (!(mask >> x & 1)) continue;
      mass += pi[x];
      for (std::size_t y = 0; y < n; ++y)
        if (!(mask >> y & 1)) flow += pi[x] * p(x, y);
    }
    if (mass <= 0.5 + 1e-12) best = std::min(best, flow / mass);
  }
  return best;
}

} // namespace

TEST_SUITE("dynamics") {

TEST_CASE("two-state asymptotic variance") {
  for (double a : {0.1, 0.3, 0.8})
    for (double b : {0.2, 0.6}) {
      const MarkovKernel p(rows({{1 - a, a}, {b, 1 - b}}));
      const Distribution pi(Vector{{b / (a + b), a / (a + b)}});
      const double rho = 1 - a - b, var = pi[0] * pi[1];
      const VarianceDetail d = asymptotic_variance_detail(ObsFunction{1.0, 0.0}, p, pi);
      CHECK(d.value == doctest::Approx(var * (1 + rho) / (1 - rho)).epsilon(1e-12));
      CHECK(d.mean_removed);
      CHECK(d.residual < 1e-12);
      REQUIRE(d.spectral_value.has_value());
      CHECK(*d.spectral_value == doctest::Approx(d.value).epsilon(1e-10));
    }
}

TEST_CASE("independent sampling has variance equal to Var(f)") {
  const Distribution pi(Vector{{0.2, 0.3, 0.5}});
  const ObsFunction f{1.0, -2.0, 0.5};
  const double mean = 0.2 - 0.6 + 0.25;
  const double var = 0.2 * std::pow(1 - mean, 2) + 0.3 * std::pow(-2 - mean, 2) + 0.5 * std::pow(0.5 - mean, 2);
  CHECK(asymptotic_variance(f, stationary_projector(pi), pi) == doctest::Approx(var).epsilon(1e-12));
}

TEST_CASE("periodic chains have no asymptotic variance") {
  const MarkovKernel p(rows({{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(asymptotic_variance(ObsFunction{1.0, -1.0}, p, Distribution::uniform(2)), DomainError);
}

TEST_CASE("worst-case variance bounds every unit function") {
  Rng rng(19);
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = random_distribution(rng, 5);
    const MarkovKernel p = lazy(random_reversible(rng, pi));
    const double worst = worst_case_asymptotic_variance(p, pi);
    CHECK(worst == doctest::Approx((2 - spectral_report(p, pi).lambda) / spectral_report(p, pi).lambda));
    Vector v(5);
    for (int i = 0; i < 5; ++i) v[i] = rng.uniform(-1, 1);
    v.array() -= pi.weights().dot(v);
    v /= std::sqrt(pi.weights().dot(v.cwiseProduct(v)));
    CHECK(asymptotic_variance(ObsFunction(v), p, pi) <= worst + 1e-10);
  }
}

TEST_CASE("Cheeger constant") {
  const MarkovKernel p(rows({{0.7, 0.3}, {0.2, 0.8}}));
  const CheegerResult c = cheeger(p, Distribution(Vector{{0.4, 0.6}}));
  CHECK(c.phi == doctest::Approx(0.3));
  CHECK(c.argmin_set == std::vector<std::size_t>{0});
  Rng rng(20);
  for (int t = 0; t < 20; ++t) {
    const Distribution pi = random_distribution(rng, 3 + t % 6);
    const MarkovKernel k = random_reversible(rng, pi);
    CHECK(cheeger(k, pi).phi == doctest::Approx(naive_cheeger(k, pi)).epsilon(1e-12));
  }
  const NamedModel big = named_model("srw-cycle", {.n = 21});
  CHECK_THROWS_AS(cheeger(big.kernel, big.pi), LimitError);
}

TEST_CASE("distances match explicit powers") {
  Rng rng(21);
  const Distribution pi = random_distribution(rng, 6);
  const MarkovKernel p = random_stationary(rng, pi);
  Matrix pt = Matrix::Identity(6, 6);
  for (std::uint64_t t = 0; t <= 9; ++t) {
    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf})
      CHECK(lp_distance(p, t, n, pi) == doctest::Approx(worst_case_distance(pt, pi, n)).epsilon(1e-10));
    pt *= p.matrix();
  }
  const Matrix target = Vector::Ones(6) * pi.weights().transpose();
  CHECK(worst_case_distance(target, pi, Norm::Linf) == doctest::Approx(0.0));
}

TEST_CASE("mixing time agrees with the curve and with a naive oracle") {
  Rng rng(22);
  for (int t = 0; t < 15; ++t) {
    const Distribution pi = random_distribution(rng, 4 + t % 5);
    const MarkovKernel p = lazy(random_reversible(rng, pi));
    const std::vector<double> eps{0.5, 0.1, 0.01, 1e-4};
    for (Norm n : {Norm::L1, Norm::L2, Norm::Linf}) {
      const MixingCurve c = mixing_curve(p, pi, n, eps, 2000);
      for (const auto& [e, tm] : c.t_mix) CHECK(mixing_time(p, pi, n, e, 2000) == tm);
    }
    CHECK(*mixing_time(p, pi, Norm::L1, 0.05, 100000) == naive_tmix_l1(p, pi, 0.05));
  }
  CHECK(mixing_time(stationary_projector(Distribution::uniform(3)), Distribution::uniform(3), Norm::L1, 0.5, 10) == 1u);
  const MarkovKernel flip(rows({{0, 1}, {1, 0}}));
  CHECK_FALSE(mixing_time(flip, Distribution::uniform(2), Norm::L1, 0.1, 1000).has_value());
}

TEST_CASE("frozen DHN mixing times") {
  const std::vector<std::pair<int, std::uint64_t>> k{{8, 21}, {16, 45}};
  const std::vector<std::pair<int, std::uint64_t>> kra{{8, 31}, {16, 121}};
  for (auto [n, t] : k) {
    const NamedModel m = named_model("dhn", {.n = n});
    CHECK(naive_tmix_l1(m.kernel, m.pi, 0.125) == t);
    CHECK(mixing_time(m.kernel, m.pi, Norm::L1, 0.125, 1000000) == t);
  }
  for (auto [n, t] : kra) {
    const NamedModel m = named_model("dhn-right-averaged", {.n = n});
    CHECK(naive_tmix_l1(m.kernel, m.pi, 0.125) == t);
    CHECK(mixing_time(m.kernel, m.pi, Norm::L1, 0.125, 1000000) == t);
  }
}

TEST_CASE("norm names") {
  CHECK(norm_from_string("1") == Norm::L1);
  CHECK(norm_from_string("L2") == Norm::L2);
  CHECK(norm_from_string(to_string(Norm::Linf)) == Norm::Linf);
  CHECK_THROWS(norm_from_string("3"));
}

TEST_CASE("sample paths are seeded and follow the kernel") {
  const MarkovKernel p(rows({{0.9, 0.1, 0.0}, {0.2, 0.5, 0.3}, {0.0, 0.4, 0.6}}));
  const Trajectory a = sample_path(p, 0, 200000, 42), b = sample_path(p, 0, 200000, 42);
  CHECK(a.states == b.states);
  CHECK(a.states.size() == 200001);
  CHECK(sample_path(p, 0, 1000, 43).states != sample_path(p, 0, 1000, 42).states);
  std::vector<double> freq(3, 0.0);
  for (std::size_t i = 1; i < a.states.size(); ++i) {
    CHECK(p(a.states[i - 1], a.states[i]) > 0.0);
    freq[a.states[i]] += 1.0 / 200000;
  }
  // Birth-death chain: pi(0) 0.1 = pi(1) 0.2 and pi(1) 0.3 = pi(2) 0.4.
  const Distribution pi(Vector{{8.0 / 15, 4.0 / 15, 3.0 / 15}});
  CHECK(is_stationary(p, pi));
  for (std::size_t x = 0; x < 3; ++x) CHECK(std::abs(freq[x] - pi[x]) < 0.02);
}

TEST_CASE("pseudo-marginal kernel") {
  Rng rng(23);
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 5}));
  const Distribution pi = random_distribution(rng, 5);
  const MarkovKernel k = pmmh_kernel(pi, g, nearest_neighbour_proposal(5));
  const Distribution ext = extended_target(g, pi);
  CHECK(is_stationary(k, ext, 1e-12));
  CHECK(is_reversible(k, ext, 1e-12));
}

}
