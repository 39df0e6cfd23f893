#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "catalog.hpp"
#include "grpavg/averaging.hpp"
#include "grpavg/divergence.hpp"
#include "grpavg/dynamics.hpp"
#include "grpavg/error.hpp"
#include "grpavg/models.hpp"
#include "grpavg/spectral.hpp"
#include "grpavg/harness/targets.hpp"

namespace grpavg::harness::detail {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

/// Keeps the instance with the smallest slack for one inequality
/// lhs <= rhs (or lhs >= rhs) and emits a single check for it.
class Worst {
public:
  Worst(std::string name, std::string target, bool upper) : name_(std::move(name)), target_(std::move(target)), upper_(upper) {}

  void add(double lhs, double rhs, const std::string& where) {
    const double slack = upper_ ? rhs - lhs : lhs - rhs;
    const double key = std::isnan(slack) ? -inf : slack;
    if (count_++ == 0 || key < slack_) {
      slack_ = key;
      lhs_ = lhs;
      rhs_ = rhs;
      where_ = where;
    }
  }

  void emit(ExperimentReport& r) const {
    const double tol = target(target_).tolerance;
    const std::string label = name_ + (where_.empty() ? "" : " [worst: " + where_ + "]");
    r.metric(name_ + " instances", static_cast<double>(count_));
    if (count_ == 0) {
      r.check_true(name_ + " (no instance evaluated)", target_, false);
      return;
    }
    if (upper_) r.check_le(label, target_, lhs_, rhs_, tol);
    else r.check_ge(label, target_, lhs_, rhs_, tol);
  }

private:
  std::string name_, target_;
  bool upper_;
  std::size_t count_ = 0;
  double slack_ = inf, lhs_ = 0.0, rhs_ = 0.0;
  std::string where_;
};

struct Instance {
  std::string group_name;
  FiniteGroup group;
};

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Cycles through flip-type reflections, shifts, block reversals and
/// small random groups.
Instance random_group(Rng& rng, int kind, int max_n) {
  const int n = 3 + static_cast<int>(rng.index(static_cast<std::size_t>(max_n - 2)));
  switch (kind % 4) {
  case 0: return {"reflection n=" + std::to_string(n), close_generators(named_group("reflection", {.n = n}))};
  case 1: return {"shift n=" + std::to_string(n), close_generators(named_group("shift", {.n = n}))};
  case 2: {
    const int k = max_n >= 8 && rng.uniform() < 0.5 ? 3 : 2;
    return {"block-reversal n=" + std::to_string(1 << k),
            close_generators(named_group("block-reversal", {.n = 1 << k}))};
  }
  default:
    for (;;) {
      std::vector<Perm> gens{random_perm(rng, static_cast<std::size_t>(n))};
      if (rng.uniform() < 0.5) gens.push_back(random_perm(rng, static_cast<std::size_t>(n)));
      try {
        FiniteGroup g = close_generators(gens, 120);
        if (g.order() > 1) return {"random n=" + std::to_string(n) + " |G|=" + std::to_string(g.order()), std::move(g)};
      } catch (const LimitError&) {
      }
    }
  }
}

/// Random mixture of the named pair measures. With `symmetric` only the
/// kinds invariant under (g, h) -> (h^-1, g^-1) with uniform marginals
/// are used.
PairMeasure random_nu(Rng& rng, const FiniteGroup& g, bool symmetric) {
  const std::vector<PairKind> all{PairKind::product, PairKind::conjugation, PairKind::twisted, PairKind::left,
                                  PairKind::right};
  const std::size_t pool = symmetric ? 3 : all.size();
  std::vector<double> w(pool);
  double total = 0.0;
  for (double& x : w) total += x = rng.uniform() < 0.4 ? 0.0 : rng.uniform(0.1, 1.0);
  if (total == 0.0) {
    w[rng.index(pool)] = 1.0;
    total = 1.0;
  }
  std::vector<PairMeasure::Atom> atoms;
  for (std::size_t k = 0; k < pool; ++k) {
    if (w[k] == 0.0) continue;
    const PairMeasure part = pair_measure(g, all[k]);
    for (const auto& a : part.atoms()) atoms.push_back({a.left, a.right, a.weight * w[k] / total});
  }
  return pair_measure(g, std::move(atoms));
}

double tmix(const std::optional<std::uint64_t>& t) { return t ? static_cast<double>(*t) : inf; }

} // namespace

void random_batteries(const RunContext& ctx, ExperimentReport& r) {
  const int instances = ctx.get_int("instances");
  const int max_n = ctx.get_int("max_n");
  const int eps_exponents = ctx.get_int("eps_exponents");
  const auto t_max = static_cast<std::uint64_t>(ctx.get_int("t_max"));
  const int mixing_every = std::max(1, ctx.get_int("mixing_every"));
  if (max_n < 4) throw DomainError("random-batteries: max_n must be at least 4");

  Worst gamma_da("gamma(P_da) >= gamma(P)", "battery.gamma", false);
  Worst gamma_la_ra("gamma((P_la)_ra) >= gamma(P_da)", "battery.gamma", false);
  Worst gamma_la_bound("gamma(P_la) >= left-average bound", "battery.gamma", false);
  Worst gamma_ra_bound("gamma(P_ra) >= right-average bound", "battery.gamma", false);
  Worst gamma_sd("gamma(QP), gamma(PQ), gamma(QPQ) >= gamma(P)", "battery.gamma_sd", false);
  Worst pyth("|Pythagorean residual|", "battery.pythagorean", true);
  Worst pyth_sd("|state-dependent Pythagorean residual|", "battery.pythagorean_sd", true);
  Worst bisect("|D(P, M) - D(U_g P U_h, U_g M U_h)|", "battery.bisection", true);
  Worst sandwich_lo("t(QPQ, 2 eps) <= t(P_la or P_ra, eps)", "battery.mixing_sandwich", true);
  Worst sandwich_hi("t(P_la or P_ra, eps) <= t(QPQ, eps / 2) + 1", "battery.mixing_sandwich", true);
  Worst cheeger_orbit("Phi(orbit average) >= Phi(P), lazy reversible P", "battery.cheeger", false);
  Worst cheeger_la_ra("Phi((P_la)_ra) >= Phi(P)", "battery.cheeger", false);
  Worst reduction("|predicted - observed|", "battery.asympvar_reduction", true);
  Worst inherit_stat("P_da stationary defect", "battery.inheritance", true);
  Worst inherit_rev("P_da reversibility defect, symmetric nu", "battery.inheritance", true);
  Worst inherit_adj("|(P_la)* - (P*)_ra|", "battery.inheritance", true);
  Worst inherit_trace("|Tr(orbit average) - Tr(P)|", "battery.inheritance", true);
  Worst inherit_hs("HS norm chain P >= P_la >= (P_la)_ra, P >= P_ra, P >= orbit", "battery.inheritance", false);
  Worst orbit_class("orbit average outside L(G,G^-1)", "battery.orbit_class", true);
  Worst orbit_gap("lambda(orbit average) >= u_V bound", "battery.orbit_gap_bound", false);
  Worst orbit_gap_floor("u_V bound >= lambda(P)", "battery.orbit_gap_bound", false);
  Worst orbit_gap_agree("|u_V bound - subspace bound|", "battery.orbit_gap_bound", true);
  std::size_t reduction_skipped = 0;
  std::size_t twisted_skipped = 0;

  const TargetClass classes[] = {TargetClass::LGGinv, TargetClass::LGG, TargetClass::LI, TargetClass::RI,
                                 TargetClass::LI_and_RI};
  const AverageKind kinds[] = {AverageKind::orbit, AverageKind::twisted, AverageKind::left, AverageKind::right,
                               AverageKind::independent};

  for (int i = 0; i < instances; ++i) {
    Rng rng(splitmix(ctx.seed ^ splitmix(static_cast<std::uint64_t>(i))));
    const Instance inst = random_group(rng, i, max_n);
    const FiniteGroup& g = inst.group;
    const std::size_t n = g.degree();
    const std::string where = "instance " + std::to_string(i) + ", " + inst.group_name;
    const Distribution pi = pi_G(random_distribution(rng, n), g);
    const Distribution pi_free = random_distribution(rng, n);
    const MarkovKernel p = random_stationary(rng, pi);
    const MarkovKernel p_rev = random_reversible(rng, pi);
    const PairMeasure nu = random_nu(rng, g, false);
    const PairMeasure nu_sym = random_nu(rng, g, true);
    const auto perms = std::span<const Perm>(g.elements());

    // Multiplicative gaps.
    const MarkovKernel p_da = double_average(p, perms, nu);
    const MarkovKernel p_la = special_average(p, g, AverageKind::left, pi);
    const MarkovKernel p_ra = special_average(p, g, AverageKind::right, pi);
    const MarkovKernel p_lara = special_average(p, g, AverageKind::independent, pi);
    const double gp = spectral_report(p, pi).gamma;
    const double gda = spectral_report(p_da, pi).gamma;
    gamma_da.add(gda, gp, where);
    gamma_la_ra.add(spectral_report(p_lara, pi).gamma, gda, where);
    const GammaBounds gb = gamma_bounds_la_ra(p, g, pi);
    gamma_la_bound.add(spectral_report(p_la, pi).gamma, gb.bound_la, where);
    gamma_ra_bound.add(spectral_report(p_ra, pi).gamma, gb.bound_ra, where);

    const MarkovKernel p_free = random_stationary(rng, pi_free);
    const double gfree = spectral_report(p_free, pi_free).gamma;
    for (Side side : {Side::left, Side::right, Side::both})
      gamma_sd.add(spectral_report(sd_average(p_free, g, pi_free, side), pi_free).gamma, gfree, where);

    // Pythagorean identities, invariant regime.
    const MarkovKernel m0 = random_stationary(rng, pi);
    for (int c = 0; c < 5; ++c) {
      const MarkovKernel avg = special_average(p, g, kinds[c], pi);
      const MarkovKernel m = special_average(m0, g, kinds[c], pi);
      // The twisted average lies in L(G,G) only for some groups (abelian ones, for instance).
      if (classes[c] == TargetClass::LGG && !(invariance_class(avg, g, pi).in_LGG && invariance_class(m, g, pi).in_LGG)) {
        ++twisted_skipped;
        continue;
      }
      for (Metric metric : {Metric::KL, Metric::HS2, Metric::F2}) {
        const PythagoreanCheck pc = pythagorean_check(p, m, avg, pi, metric, g, classes[c]);
        if (pc.conclusive) pyth.add(std::abs(pc.residual), 0.0, where + ", " + to_string(metric) + " " + to_string(classes[c]));
      }
    }
    // State-dependent regime.
    {
      const MarkovKernel m_free = random_stationary(rng, pi_free);
      const Side sides[] = {Side::left, Side::right, Side::both};
      const TargetClass sd_classes[] = {TargetClass::LI, TargetClass::RI, TargetClass::LI_and_RI};
      for (int c = 0; c < 3; ++c) {
        const MarkovKernel avg = sd_average(p_free, g, pi_free, sides[c]);
        const MarkovKernel m = sd_average(m_free, g, pi_free, sides[c]);
        for (Metric metric : {Metric::KL, Metric::HS2}) {
          const PythagoreanCheck pc = sd_pythagorean_check(p_free, m, avg, pi_free, metric, g, sd_classes[c]);
          if (pc.conclusive)
            pyth_sd.add(std::abs(pc.residual), 0.0, where + ", " + to_string(metric) + " " + to_string(sd_classes[c]));
        }
      }
    }

    // Invariance of the divergences under a common sandwich.
    {
      const Perm& a = g[rng.index(g.order())];
      const Perm& b = g[rng.index(g.order())];
      const MarkovKernel m = random_stationary(rng, pi);
      bisect.add(std::abs(kl_pi(p, m, pi) - kl_pi(sandwich(p, a, b), sandwich(m, a, b), pi)), 0.0, where + ", KL");
      bisect.add(std::abs(hs_dist(p, m, pi) - hs_dist(sandwich(p, a, b), sandwich(m, a, b), pi)), 0.0, where + ", HS");
    }

    // Mixing-time sandwich, both regimes and all three norms.
    if (i % mixing_every == 0) {
      struct Regime {
        const MarkovKernel* la;
        const MarkovKernel* ra;
        MarkovKernel lara;
        const Distribution* law;
        const char* label;
      };
      const MarkovKernel qp = sd_average(p_free, g, pi_free, Side::left);
      const MarkovKernel pq = sd_average(p_free, g, pi_free, Side::right);
      const std::vector<Regime> regimes{{&p_la, &p_ra, p_lara, &pi, "invariant"},
                                        {&qp, &pq, sd_average(p_free, g, pi_free, Side::both), &pi_free, "free"}};
      for (const Regime& reg : regimes) {
        for (Norm norm : {Norm::L1, Norm::L2, Norm::Linf}) {
          for (int e = 1; e <= eps_exponents; ++e) {
            const double eps = std::ldexp(1.0, -e);
            const double t2 = tmix(mixing_time(reg.lara, *reg.law, norm, 2 * eps, t_max));
            const double th = tmix(mixing_time(reg.lara, *reg.law, norm, eps / 2, t_max));
            for (const MarkovKernel* side : {reg.la, reg.ra}) {
              const double t = tmix(mixing_time(*side, *reg.law, norm, eps, t_max));
              if (!std::isfinite(t) || !std::isfinite(th)) continue;
              const std::string w = where + ", " + reg.label + " p=" + to_string(norm) + " eps=2^-" + std::to_string(e);
              sandwich_lo.add(t2, t, w);
              sandwich_hi.add(t, th + 1.0, w);
            }
          }
        }
      }
    }

    // Cheeger constants.
    if (n <= static_cast<std::size_t>(max_n) && n <= max_cheeger_states) {
      // Lazy reversible kernels are nonnegative definite.
      const MarkovKernel psd = lazy(p_rev);
      const double phi = cheeger(psd, pi).phi;
      cheeger_orbit.add(cheeger(special_average(psd, g, AverageKind::orbit, pi), pi).phi, phi, where);
      cheeger_la_ra.add(cheeger(special_average(psd, g, AverageKind::independent, pi), pi).phi, phi, where);
    }

    // Variance reduction for invariant mean-zero f.
    {
      Vector raw(static_cast<Eigen::Index>(n));
      for (Eigen::Index x = 0; x < raw.size(); ++x) raw[x] = rng.uniform(-1.0, 1.0);
      Vector fv = Vector::Zero(raw.size());
      for (const auto& orbit : orbits(g)) {
        double mean = 0.0;
        for (std::size_t x : orbit) mean += raw[static_cast<Eigen::Index>(x)];
        mean /= static_cast<double>(orbit.size());
        for (std::size_t x : orbit) fv[static_cast<Eigen::Index>(x)] = mean;
      }
      fv.array() -= pi.weights().dot(fv);
      try {
        const VarianceReduction red = asympvar_reduction(ObsFunction(fv), p_rev, g, nu_sym, pi);
        reduction.add(std::abs(red.observed - red.predicted), 0.0, where);
      } catch (const DomainError&) {
        ++reduction_skipped;
      }
    }

    // Inheritance of properties.
    {
      inherit_stat.add(max_abs(p_da.push(pi.weights()) - pi.weights()), 0.0, where);
      const MarkovKernel rev_da = double_average(p_rev, perms, nu_sym);
      const Matrix flow = pi.weights().asDiagonal() * rev_da.matrix();
      inherit_rev.add(max_abs(flow - flow.transpose()), 0.0, where);
      const MarkovKernel lhs = adjoint(p_la, pi);
      const MarkovKernel rhs = special_average(adjoint(p, pi), g, AverageKind::right, pi);
      inherit_adj.add(max_abs(lhs.matrix() - rhs.matrix()), 0.0, where);
      const MarkovKernel orbit_avg = special_average(p, g, AverageKind::orbit, pi);
      inherit_trace.add(std::abs(trace_pi(orbit_avg) - trace_pi(p)), 0.0, where);
      const double hp = hs_norm(p, pi), hla = hs_norm(p_la, pi), hlara = hs_norm(p_lara, pi);
      inherit_hs.add(hp, hla, where + ", P vs P_la");
      inherit_hs.add(hla, hlara, where + ", P_la vs (P_la)_ra");
      inherit_hs.add(hp, hs_norm(p_ra, pi), where + ", P vs P_ra");
      inherit_hs.add(hp, hs_norm(orbit_avg, pi), where + ", P vs orbit");
      const InvarianceFlags flags = invariance_class(orbit_avg, g, pi);
      orbit_class.add(flags.in_LGGinv ? 0.0 : 1.0, 0.0, where);
    }

    // Orbit-average gap bound when the additive gap is simple.
    {
      const SpectralReport rep = spectral_report(p_rev, pi);
      const SubspaceBasis w = gap_eigenspace(p_rev, pi, GapSpace::W);
      if (w.dim() == 1 && rep.lambda2 > rep.lambda) {
        const Vector u = w.vectors[0].values();
        Vector uv = Vector::Zero(u.size());
        for (const Perm& h : g.elements())
          for (Eigen::Index x = 0; x < u.size(); ++x) uv[x] += u[static_cast<Eigen::Index>(h[static_cast<std::size_t>(x)])];
        uv /= static_cast<double>(g.order());
        const double a = weighted_inner(ObsFunction(uv), ObsFunction(uv), pi) / weighted_inner(ObsFunction(u), ObsFunction(u), pi);
        const double bound = std::min(a * rep.lambda + (1 - a) * rep.lambda2, (1 - a) * rep.lambda + a * rep.lambda2);
        const double lam_bar = spectral_report(special_average(p_rev, g, AverageKind::orbit, pi), pi).lambda;
        orbit_gap.add(lam_bar, bound, where);
        orbit_gap_floor.add(bound, rep.lambda, where);
        orbit_gap_agree.add(std::abs(bound - overline_gap_bound(p_rev, g, pi).bound), 0.0, where);
      }
    }
  }

  r.metric("instances", instances);
  r.metric("reduction_skipped", static_cast<double>(reduction_skipped));
  r.metric("twisted_class_skipped", static_cast<double>(twisted_skipped));
  for (const Worst* w : {&gamma_da, &gamma_la_ra, &gamma_la_bound, &gamma_ra_bound, &gamma_sd, &pyth, &pyth_sd, &bisect,
                         &sandwich_lo, &sandwich_hi, &cheeger_orbit, &cheeger_la_ra, &reduction, &inherit_stat,
                         &inherit_rev, &inherit_adj, &inherit_trace, &inherit_hs, &orbit_class, &orbit_gap,
                         &orbit_gap_floor, &orbit_gap_agree})
    w->emit(r);
  r.check_le("variance-reduction instances skipped at unit spectral radius", "battery.asympvar_reduction",
             static_cast<double>(reduction_skipped), 0.05 * instances);
}

} // namespace grpavg::harness::detail
