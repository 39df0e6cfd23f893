#include "grpavg/harness/targets.hpp"

#include "grpavg/error.hpp"

namespace grpavg::harness {

std::string to_string(Source s) {
  switch (s) {
  case Source::published: return "published";
  case Source::computed: return "computed";
  case Source::structural: return "structural";
  }
  return "?";
}

const std::vector<Target>& targets() {
  using S = Source;
  static const std::vector<Target> table{
      // asympvar-3state
      {"asympvar.v_P", "asympvar-3state", "v(f, P) for the 3-state reversible example", {0.2353}, 5e-4, S::published},
      {"asympvar.v_orbit", "asympvar-3state", "v(f, orbit average of P)", {0.2486}, 5e-4, S::published},
      {"asympvar.v_la_ra", "asympvar-3state", "v(f, (P_la)_ra), larger than v(f, P)", {0.4610}, 5e-4, S::published},
      {"asympvar.orbit_matrix", "asympvar-3state", "orbit average of the 3-state P, row-major",
       {0.105, 0.5, 0.395, 0.5, 0.105, 0.395, 0.395, 0.395, 0.21}, 1e-12, S::published},
      {"asympvar.v_prime", "asympvar-3state", "V' is spanned by (1, 1, -2) for uniform pi and G = {e, (12)}",
       {1.0, 1.0, -2.0}, 1e-12, S::published},
      {"asympvar.spectral_cross_check", "asympvar-3state",
       "linear-solve and eigen-expansion variances agree for reversible P", {}, 1e-10, S::computed},
      // frobenius-counterexamples
      {"frobenius.Q_matrix", "frobenius-counterexamples", "Q(G, pi) for pi = (0.3, 0.5, 0.2), row-major",
       {0.375, 0.625, 0.0, 0.375, 0.625, 0.0, 0.0, 0.0, 1.0}, 1e-12, S::published},
      {"frobenius.first.lhs", "frobenius-counterexamples", "||P - M||_F^2, first instance", {0.4725}, 5e-4,
       S::published},
      {"frobenius.first.frob_dist", "frobenius-counterexamples", "frob_dist(P, M) = sqrt(0.4725)", {0.6873863542433760},
       1e-12, S::published},
      {"frobenius.first.rhs", "frobenius-counterexamples", "F^2 right-hand sides for QPQ, QP, PQ, first instance",
       {0.45625, 0.46250, 0.45625}, 5e-4, S::published},
      {"frobenius.first.sign", "frobenius-counterexamples", "lhs exceeds every right-hand side, first instance", {},
       0.0, S::published},
      {"frobenius.second.lhs", "frobenius-counterexamples", "||P - M||_F^2, second instance", {0.9780}, 5e-4,
       S::published},
      {"frobenius.second.rhs", "frobenius-counterexamples", "F^2 right-hand sides for QPQ, QP, PQ, second instance",
       {0.9966, 0.9791, 0.9832}, 5e-4, S::published},
      {"frobenius.second.sign", "frobenius-counterexamples", "lhs is below every right-hand side, second instance",
       {}, 0.0, S::published},
      {"frobenius.hs_contrast", "frobenius-counterexamples", "the pi-weighted HS^2 identity holds on both instances",
       {}, 1e-10, S::computed},
      // trace-2state
      {"trace.la_ra", "trace-2state", "Tr(P_la) = Tr(P_ra) = a + b > 2a for b > a", {}, 1e-12, S::published},
      {"trace.P", "trace-2state", "Tr(P) = 2a", {}, 1e-12, S::published},
      {"trace.orbit_preserved", "trace-2state", "Tr(orbit average) = Tr(P)", {}, 1e-12, S::published},
      // uniform-shift
      {"uniform_shift.la_is_Pi", "uniform-shift", "P_la = Pi for uniform pi and the shift group", {}, 1e-12,
       S::published},
      {"uniform_shift.tmix_one", "uniform-shift", "t_mix,p of P_la, P_ra, (P_la)_ra equals 1, p in {1, 2, inf}",
       {1.0}, 0.0, S::published},
      // dhn-counterexample
      {"dhn.n2_rows", "dhn-counterexample", "4-state DHN kernel at n = 2, row-major",
       {0, .5, .5, 0, 0, .5, .5, 0, .5, 0, 0, .5, .5, 0, 0, .5}, 1e-12, S::published},
      {"dhn.nonreversible", "dhn-counterexample", "K is stationary for uniform pi and not reversible", {}, 0.0,
       S::published},
      {"dhn.gamma_zero", "dhn-counterexample", "gamma(K) = gamma(K_ra) = 0", {0.0}, 1e-10, S::published},
      {"dhn.mixing_trend", "dhn-counterexample",
       "log-log slopes of TV t_mix(1/8) against n: K near 1, K_ra near 2, ratio near 1", {1.0, 2.0, 1.0}, 0.25,
       S::computed},
      // vshape
      {"vshape.mh_closed_form", "vshape", "MH entries equal (1/2) exp(-beta (dH)_+) at n = 2, beta = 1", {}, 1e-12,
       S::published},
      {"vshape.pi_invariant", "vshape", "pi_beta is invariant under the flip x -> -x", {}, 0.0, S::published},
      {"vshape.invariance_classes", "vshape", "P_beta is in L(G,G^-1) and L(G,G) but not LI or RI", {}, 0.0,
       S::published},
      {"vshape.averages_differ", "vshape", "P_la, P_ra and (P_la)_ra all differ from P_beta", {}, 1e-10,
       S::published},
      {"vshape.isotropy_zero", "vshape", "KL distance from P_beta to its orbit average is 0", {0.0}, 1e-12,
       S::published},
      {"vshape.gap_bound", "vshape", "lambda((P_la)_ra) >= (1 - e^-beta) / (36 n^3)", {}, 0.0, S::published},
      {"vshape.rapid_mixing", "vshape",
       "t_mix,1(L_beta, eps) <= 72 n^3 / (1 - e^-beta) (beta n + log((2n + 1) / eps))", {}, 0.0, S::published},
      {"vshape.torpid_mixing", "vshape", "t_mix,1(P_beta, eps) >= (e^(beta n) / (2n + 1)^2 - 1) log(1 / eps)", {},
       0.0, S::published},
      {"vshape.ratio_growth", "vshape", "t_mix(P_beta) / t_mix(L_beta) grows at least x2 per unit n at beta = 2",
       {2.0}, 0.0, S::computed},
      {"vshape.reduction_equality", "vshape",
       "zero variance reduction for invariant f when P commutes with the group", {0.0}, 1e-9, S::published},
      // vshape-perturbed
      {"vshape_perturbed.pi_noninvariant", "vshape-perturbed", "pi_{beta,delta} is not flip-invariant", {}, 0.0,
       S::published},
      {"vshape_perturbed.gap_bound", "vshape-perturbed",
       "lambda(QPQ) >= (1 - e^-beta) / (36 n^3 e^(2 beta delta))", {}, 0.0, S::published},
      {"vshape_perturbed.rapid_mixing", "vshape-perturbed",
       "t_mix,1(L_{beta,delta}, eps) <= 72 n^3 e^(2 beta delta) / (1 - e^-beta) (beta n + log((2n + 1) / eps))", {},
       0.0, S::published},
      // ncycle-blockrev
      {"ncycle.sigma5", "ncycle-blockrev", "sigma^(5)(i) = 33 - i on 32 points, 1-based", {}, 0.0, S::published},
      {"ncycle.sigma2", "ncycle-blockrev", "sigma^(2) = (1 4)(2 3)(5 8)(6 7)... on 32 points, 1-based", {}, 0.0,
       S::published},
      {"ncycle.gap", "ncycle-blockrev", "lambda(P_da) >= 1 / (k + 1)^2", {}, 0.0, S::published},
      {"ncycle.rapid_mixing", "ncycle-blockrev", "t_mix,1(L_da, eps) <= 2 (log2 n + 1)^2 log(n / eps)", {}, 0.0,
       S::published},
      {"ncycle.srw_lower", "ncycle-blockrev", "t_mix,1(lazy SRW, 1/8) >= n^2 / 32", {}, 0.0, S::published},
      // cdg-averaging
      {"cdg.construction", "cdg-averaging", "cdg kernel equals U_g0 P entrywise with uniform stationary law", {},
       1e-12, S::computed},
      {"cdg.gamma_improvement", "cdg-averaging", "gamma(K') >= gamma(U_g0 P) - 1e-9", {}, 1e-9, S::published},
      {"cdg.power_map", "cdg-averaging", "power-map generators are mutually inverse bijections", {}, 0.0,
       S::published},
      // sw-check
      {"sw.marginal_match", "sw-check", "spin marginal of P_bond Q(G, pi~) equals the exact SW kernel", {}, 1e-10,
       S::computed},
      {"sw.potts_marginal", "sw-check", "sigma-marginal of pi~ equals the Potts law", {}, 1e-12, S::computed},
      {"sw.beta_zero", "sw-check", "beta = 0 gives the uniform product law from every state", {}, 1e-12,
       S::structural},
      // pt-check
      {"pt.direct_match", "pt-check", "K1 K2 equals the directly enumerated tempering kernel", {}, 1e-10,
       S::computed},
      {"pt.stationary", "pt-check", "K1, K2, K1 K2 and (K1 + K2) / 2 are stationary for the joint law", {}, 1e-10,
       S::published},
      {"pt.single_level", "pt-check", "one temperature gives K = level move", {}, 1e-12, S::structural},
      {"pt.equal_temperatures", "pt-check", "equal temperatures accept every swap", {}, 1e-12, S::structural},
      // pmmh-check
      {"pmmh.stationary", "pmmh-check", "pseudo-marginal kernel is pi~-stationary", {}, 1e-12, S::published},
      {"pmmh.marginal", "pmmh-check", "X-marginal of pi~ equals pi_G", {}, 1e-12, S::published},
      {"pmmh.kl_minimal", "pmmh-check", "pi_G minimizes KL(pi || nu) over G-invariant nu", {}, 1e-12, S::published},
      {"pmmh.metropolis_average", "pmmh-check", "Metropolis-type averaging kernel is pi~-stationary", {}, 1e-12,
       S::published},
      // random-batteries
      {"battery.gamma", "random-batteries", "gamma(P_da) >= gamma(P) and gamma((P_la)_ra) >= gamma(P_da)", {}, 1e-9,
       S::published},
      {"battery.gamma_sd", "random-batteries", "gamma of QP, PQ, QPQ >= gamma(P) without invariance of pi", {}, 1e-9,
       S::published},
      {"battery.pythagorean", "random-batteries", "KL and HS^2 Pythagorean residuals vanish", {}, 1e-8,
       S::published},
      {"battery.pythagorean_sd", "random-batteries", "state-dependent KL and HS^2 Pythagorean residuals vanish", {},
       1e-8, S::published},
      {"battery.bisection", "random-batteries", "D(P || M) = D(U_g P U_h || U_g M U_h)", {}, 1e-10, S::published},
      {"battery.mixing_sandwich", "random-batteries",
       "t(QPQ, 2 eps) <= t(P_la, eps), t(P_ra, eps) <= t(QPQ, eps / 2) + 1", {}, 0.0, S::published},
      {"battery.cheeger", "random-batteries", "Phi(orbit average) >= Phi(P) and Phi((P_la)_ra) >= Phi(P)", {},
       1e-12, S::published},
      {"battery.asympvar_reduction", "random-batteries", "predicted variance reduction equals the observed one", {},
       1e-7, S::published},
      {"battery.inheritance", "random-batteries",
       "stationarity, reversibility, adjoint swap, trace and HS inequalities of the averages", {}, 1e-10,
       S::published},
      {"battery.orbit_class", "random-batteries", "the orbit average lies in L(G,G^-1)", {}, 1e-10, S::published},
      {"battery.orbit_gap_bound", "random-batteries",
       "lambda(orbit average) >= the u_V interpolation bound >= lambda(P) for simple lambda", {}, 1e-9,
       S::published},
  };
  return table;
}

const Target& target(std::string_view id) {
  for (const Target& t : targets())
    if (t.id == id) return t;
  throw DomainError("unknown target '" + std::string(id) + "'");
}

} // namespace grpavg::harness
