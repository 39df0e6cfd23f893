#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "grpavg/group.hpp"
#include "grpavg/state.hpp"

namespace grpavg {

// Asymptotic variance

struct VarianceDetail {
  double value = 0.0;
  bool mean_removed = false;     // f had nonzero pi-mean and was centered
  double residual = 0.0;         // max |(I - P) h - f|
  std::optional<double> spectral_value;  // eigen-expansion cross-check, reversible P only
};

/// 2 <f, h> - <f, f> with (I - P) h = f, h mean zero. Throws DomainError
/// when P has spectral radius one on mean-zero functions.
double asymptotic_variance(const ObsFunction& f, const MarkovKernel& p, const Distribution& pi);
VarianceDetail asymptotic_variance_detail(const ObsFunction& f, const MarkovKernel& p, const Distribution& pi);

/// (2 - lambda) / lambda, the largest variance over unit mean-zero f for
/// reversible P.
double worst_case_asymptotic_variance(const MarkovKernel& p, const Distribution& pi);

struct VarianceReduction {
  double predicted = 0.0;  // 2 || proj_{A^{-1/2} V perp} A^{-1/2} f ||^2
  double observed = 0.0;   // v(f, P) - v(f, P_da)
  double v_before = 0.0;
  double v_after = 0.0;
};

/// Requires P reversible, pi G-invariant, nu with uniform marginals and
/// (g, h) ~ (h^-1, g^-1), and f invariant with mean zero.
VarianceReduction asympvar_reduction(const ObsFunction& f, const MarkovKernel& p, const FiniteGroup& group,
                                     const PairMeasure& nu, const Distribution& pi);

// Cheeger constant

struct CheegerResult {
  double phi = 0.0;
  std::vector<std::size_t> argmin_set;
};

inline constexpr std::size_t max_cheeger_states = 20;

/// Exact minimum of <(I-P) 1_A, 1_A> / pi(A) over nonempty A with
/// pi(A) <= 1/2 (+1e-12). Ties resolve to the lexicographically smallest
/// sorted member list.
CheegerResult cheeger(const MarkovKernel& p, const Distribution& pi);

// Mixing

enum class Norm { L1, L2, Linf };

std::string to_string(Norm p);
Norm norm_from_string(const std::string& name);

/// max_x || P^t(x, .) / pi - 1 ||_{p, pi} of an explicit t-step matrix.
double worst_case_distance(const Matrix& pt, const Distribution& pi, Norm p);
/// Same for P^t, computed by repeated squaring.
double lp_distance(const MarkovKernel& p, std::uint64_t t, Norm norm, const Distribution& pi);

struct MixingCurve {
  Norm p = Norm::L1;
  std::vector<double> distances;  // t = 0..T
  std::vector<std::pair<double, std::optional<std::uint64_t>>> t_mix;  // empty optional: not mixed by T
};

/// Distances for t = 0..t_max by successive multiplication and first
/// crossing times t >= 1 for each epsilon.
MixingCurve mixing_curve(const MarkovKernel& p, const Distribution& pi, Norm norm, const std::vector<double>& eps,
                         std::uint64_t t_max);

/// First t >= 1 with d_p(P, t) <= eps, found by doubling and bisection
/// over squared powers. The worst-case distance is nonincreasing in t
/// for pi-stationary P. Empty when the crossing lies beyond t_max.
std::optional<std::uint64_t> mixing_time(const MarkovKernel& p, const Distribution& pi, Norm norm, double eps,
                                         std::uint64_t t_max);

// Sampling

struct Trajectory {
  std::vector<std::size_t> states;
  std::uint64_t seed = 0;
};

/// Inverse-CDF path of length T + 1 from x0 with a seeded 64-bit
/// Mersenne twister.
Trajectory sample_path(const MarkovKernel& p, std::size_t x0, std::size_t steps, std::uint64_t seed);

/// Pseudo-marginal chain on X x G (flat index x * |G| + g): propose
/// x' ~ q(x, .) and g' uniform, accept with
/// min{1, pi(g'x') q(x', x) / (pi(gx) q(x, x'))}.
MarkovKernel pmmh_kernel(const Distribution& pi, const FiniteGroup& group, const MarkovKernel& proposal);

} // namespace grpavg
