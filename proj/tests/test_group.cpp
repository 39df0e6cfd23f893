#include <doctest.h>

#include <set>

#include "grpavg/error.hpp"
#include "grpavg/group.hpp"
#include "grpavg/models.hpp"
#include "support.hpp"

using namespace grpavg;
using namespace testing;

namespace {

// Naive closure by repeated products, independent of close_generators.
std::size_t naive_order(const std::vector<Perm>& gens) {
  std::set<std::vector<std::size_t>> seen{Perm::identity(gens.front().size()).map()};
  bool grew = true;
  while (grew) {
    grew = false;
    const auto current = seen;
    for (const auto& a : current)
      for (const Perm& g : gens)
        if (seen.insert((Perm(a) * g).map()).second) grew = true;
  }
  return seen.size();
}

} // namespace

TEST_SUITE("group") {

TEST_CASE("composition convention and permutation kernels") {
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    const Perm a = random_perm(rng, 6), b = random_perm(rng, 6);
    for (std::size_t x = 0; x < 6; ++x) CHECK((a * b)[x] == a[b[x]]);
    const Matrix lhs = perm_kernel(a).matrix() * perm_kernel(b).matrix();
    CHECK(max_abs(lhs - perm_kernel(b * a).matrix()) == 0.0);
    CHECK((a * a.inverse()).is_identity());
  }
}

TEST_CASE("cycles") {
  const Perm p = Perm::from_cycles(5, {{0, 1, 2}, {3, 4}});
  CHECK(p.map() == std::vector<std::size_t>{1, 2, 0, 4, 3});
  CHECK_THROWS_AS(Perm(std::vector<std::size_t>{0, 0, 1}), Error);
}

TEST_CASE("closure orders match a naive closure") {
  const std::vector<std::vector<Perm>> cases{
      {Perm::from_cycles(5, {{0, 1}}), Perm::from_cycles(5, {{0, 1, 2, 3, 4}})},
      named_group("shift", {.n = 7}),
      named_group("reflection", {.n = 6}),
      named_group("block-reversal", {.n = 8}),
      named_group("mod-mult", {.n = 11, .a = 2}),
  };
  for (const auto& gens : cases) {
    const FiniteGroup g = close_generators(gens);
    CHECK(g.order() == naive_order(gens));
    CHECK(g[0].is_identity());
    CHECK(g.verify_axioms());
  }
  CHECK(close_generators(cases[0]).order() == 120);
}

TEST_CASE("closure cap") {
  const std::vector<Perm> s6{Perm::from_cycles(6, {{0, 1}}), Perm::from_cycles(6, {{0, 1, 2, 3, 4, 5}})};
  CHECK_THROWS_AS(close_generators(s6, 100), LimitError);
}

TEST_CASE("group axioms are validated") {
  CHECK_THROWS_AS(FiniteGroup({Perm::identity(3), Perm::from_cycles(3, {{0, 1, 2}})}), Error);
  const FiniteGroup g({Perm::from_cycles(2, {{0, 1}}), Perm::identity(2)});
  CHECK(g[0].is_identity());
  CHECK(g.inverse_index(1) == 1);
}

TEST_CASE("orbits") {
  const auto o = orbits(close_generators(named_group("reflection", {.n = 5})));
  REQUIRE(o.size() == 3);
  CHECK(o[0] == std::vector<std::size_t>{0, 4});
  CHECK(o[1] == std::vector<std::size_t>{1, 3});
  CHECK(o[2] == std::vector<std::size_t>{2});
  CHECK(orbits(close_generators(named_group("shift", {.n = 5}))).size() == 1);
}

TEST_CASE("pair measures") {
  const FiniteGroup g = close_generators({Perm::from_cycles(4, {{0, 1}}), Perm::from_cycles(4, {{0, 1, 2, 3}})});
  for (PairKind k : {PairKind::product, PairKind::conjugation, PairKind::twisted}) {
    CHECK(is_measure_symmetric(g, pair_measure(g, k)));
    CHECK(has_uniform_marginals(g, pair_measure(g, k)));
  }
  CHECK_FALSE(is_measure_symmetric(g, pair_measure(g, PairKind::left)));
  CHECK_FALSE(has_uniform_marginals(g, pair_measure(g, PairKind::left)));
  CHECK_THROWS_AS(pair_measure(g, {{0, 99, 1.0}}), DomainError);
  CHECK_THROWS_AS(pair_measure(g, {{0, 0, 0.5}}), DomainError);
  CHECK(pair_kind_from_string(to_string(PairKind::twisted)) == PairKind::twisted);
}

TEST_CASE("invariance of a target") {
  const FiniteGroup g = close_generators(named_group("reflection", {.n = 4}));
  CHECK(is_pi_invariant(g, Distribution(Vector{{0.1, 0.4, 0.4, 0.1}})));
  CHECK_FALSE(is_pi_invariant(g, Distribution(Vector{{0.1, 0.4, 0.3, 0.2}})));
}

}
