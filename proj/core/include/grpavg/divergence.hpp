#pragma once

#include <optional>
#include <string>

#include "grpavg/averaging.hpp"
#include "grpavg/group.hpp"
#include "grpavg/state.hpp"

namespace grpavg {

/// sum_{x,y} pi(x) P(x,y) log(P(x,y) / M(x,y)). Terms with P(x,y) = 0
/// contribute nothing; P(x,y) > 0 with M(x,y) = 0 gives +infinity.
double kl_pi(const MarkovKernel& p, const MarkovKernel& m, const Distribution& pi);

/// Squared Hilbert-Schmidt norm on L^2(pi) of an arbitrary matrix:
/// sum_{x,y} pi(x) A(x,y)^2 / pi(y).
double hs_norm_squared(const Matrix& a, const Distribution& pi);
double hs_norm(const MarkovKernel& p, const Distribution& pi);
double hs_dist(const MarkovKernel& p, const MarkovKernel& m, const Distribution& pi);
double frob_dist(const MarkovKernel& p, const MarkovKernel& m);
/// Diagonal sum; the pi-weighting cancels in finite dimension.
double trace_pi(const MarkovKernel& p);

enum class Metric { KL, HS2, F2 };

/// Kernel classes a Pythagorean identity projects onto.
enum class TargetClass {
  LGGinv,     // U_g M U_g^-1 = M
  LGG,        // U_g M U_g = M
  LI,         // U_g M = M   (state-dependent: QM = M)
  RI,         // M U_g = M   (state-dependent: MQ = M)
  LI_and_RI,  // both        (state-dependent: QMQ = M)
  D_nu        // M_da(G, nu) = M
};

std::string to_string(Metric m);
std::string to_string(TargetClass c);

struct PythagoreanCheck {
  Metric metric = Metric::KL;
  TargetClass target_class = TargetClass::LI;
  double lhs = 0.0;       // D(P, M)
  double rhs_near = 0.0;  // D(P, avg)
  double rhs_far = 0.0;   // D(avg, M)
  double residual = 0.0;  // lhs - (rhs_near + rhs_far)
  bool conclusive = true; // false when a KL term is infinite
};

/// Invariant regime: pi must be G-invariant, `avg` must be the average
/// of P matching `cls` and M must lie in `cls`. Both memberships are
/// verified at 1e-10 and a violation raises DomainError. For D_nu the
/// measure is required, and avg must itself lie in D(G, nu).
PythagoreanCheck pythagorean_check(const MarkovKernel& p, const MarkovKernel& m, const MarkovKernel& avg,
                                   const Distribution& pi, Metric metric, const FiniteGroup& group,
                                   TargetClass cls, const PairMeasure* nu = nullptr);

/// State-dependent regime with Q = Q(G, pi); `cls` is LI, RI or
/// LI_and_RI and avg must be QP, PQ or QPQ respectively. pi need not be
/// G-invariant.
PythagoreanCheck sd_pythagorean_check(const MarkovKernel& p, const MarkovKernel& m, const MarkovKernel& avg,
                                      const Distribution& pi, Metric metric, const FiniteGroup& group,
                                      TargetClass cls);

/// kl_pi(P, orbit average of P). Requires pi G-invariant.
double distance_to_isotropy(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi);

/// pi_G(x) = mean over g of pi(g.x).
Distribution pi_G(const Distribution& pi, const FiniteGroup& group);
/// Classical KL divergence sum_x pi(x) log(pi(x) / pi0(x)); +infinity on
/// support violation.
double kl_dist(const Distribution& pi, const Distribution& pi0);
/// exp(kl_dist(pi, pi0)).
double required_sample_size(const Distribution& pi, const Distribution& pi0);

} // namespace grpavg
