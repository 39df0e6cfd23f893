#pragma once

#include <optional>
#include <span>
#include <string>

#include "grpavg/group.hpp"
#include "grpavg/state.hpp"

namespace grpavg {

/// Named averages of a kernel over a group.
enum class AverageKind {
  orbit,       // (g, g^-1), g uniform
  twisted,     // (g, g), g uniform
  left,        // (g, e)
  right,       // (e, g)
  independent  // (g, h) independent uniform; equals the left average right-averaged
};

std::string to_string(AverageKind kind);
AverageKind average_kind_from_string(const std::string& name);
PairKind pair_kind_of(AverageKind kind);

/// U_g P U_h, i.e. (x, y) -> P(g.x, h^-1.y).
MarkovKernel sandwich(const MarkovKernel& p, const Perm& g, const Perm& h);

/// sum over atoms of w * U_g P U_h. `perms` need not form a group; atoms
/// index into it.
MarkovKernel double_average(const MarkovKernel& p, std::span<const Perm> perms, const PairMeasure& nu);

/// Named average over `group`. Throws DomainError if pi is not
/// G-invariant; use `sd_average` in that case.
MarkovKernel special_average(const MarkovKernel& p, const FiniteGroup& group, AverageKind kind,
                             const Distribution& pi);

/// General average with a validated pair measure over `group`, also
/// restricted to G-invariant pi.
MarkovKernel special_average(const MarkovKernel& p, const FiniteGroup& group, const PairMeasure& nu,
                             const Distribution& pi);

enum class ZeroMass {
  reject,               // every state must have positive mass
  allow_positive_orbit,  // zero-mass states allowed when sum_g pi(g.x) > 0
  uniform_null_orbit     // as above; rows of zero-mass orbits move to g.x with g uniform
};

/// State-dependent averaging kernel Q(x, y) = sum_{g : g.x = y} pi(y) / Z(x)
/// with Z(x) = sum_g pi(g.x). The pi-orthogonal projector onto functions
/// constant on orbits.
MarkovKernel state_dependent_Q(const FiniteGroup& group, const Distribution& pi,
                               ZeroMass policy = ZeroMass::reject);

enum class Side { left, right, both };

std::string to_string(Side side);

/// QP, PQ or QPQ with Q = state_dependent_Q(group, pi). P must be
/// pi-stationary.
MarkovKernel sd_average(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi, Side side);

/// Metropolis-type averaging kernel on X x G with flat index x * |G| + g:
/// (x, g) -> (x, g') with probability min{1, pi(g'.x) / pi(g.x)} / |G|.
MarkovKernel metropolis_average_kernel(const FiniteGroup& group, const Distribution& pi);

/// Joint law pi(g.x) / |G| on X x G, flat index x * |G| + g.
Distribution extended_target(const FiniteGroup& group, const Distribution& pi);

/// Largest number of states allowed for dense extended-space kernels.
inline constexpr std::size_t max_dense_states = 4096;

struct InvarianceFlags {
  bool in_LGGinv = false;  // P = U_g P U_g^-1
  bool in_LGG = false;     // P = U_g P U_g
  bool in_LI = false;      // P = U_g P
  bool in_RI = false;      // P = P U_g
  std::optional<bool> sd_left_fixed;   // QP = P, state-dependent Q
  std::optional<bool> sd_right_fixed;  // PQ = P
  bool generators_only = false;        // quantified over a supplied list, not a closed group
};

/// Tests the four invariance predicates for every listed permutation.
InvarianceFlags invariance_class(const MarkovKernel& p, std::span<const Perm> perms, const Distribution& pi,
                                 double tol = tol::stochastic);
/// Same over a closed group, also reporting QP = P and PQ = P when pi is
/// strictly positive.
InvarianceFlags invariance_class(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi,
                                 double tol = tol::stochastic);

} // namespace grpavg
