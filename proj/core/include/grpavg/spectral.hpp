#pragma once

#include <span>
#include <string>
#include <vector>

#include "grpavg/group.hpp"
#include "grpavg/state.hpp"

namespace grpavg {

// Weighted geometry. A function f in L^2(pi) is represented by the
// Euclidean vector D^{1/2} f with D = diag(pi), so pi-inner products
// become dot products, operators P become D^{1/2} P D^{-1/2} and
// adjoints become transposes.

/// D^{1/2} P D^{-1/2}.
Matrix weighted_matrix(const MarkovKernel& p, const Distribution& pi);
/// Orthonormal basis (n x (n-1)) of the complement of sqrt(pi), i.e. the
/// weighted image of the mean-zero functions.
Matrix centered_basis(const Distribution& pi);
/// Orthonormal basis of the complement of the column span of the
/// orthonormal matrix `basis`.
Matrix orthogonal_complement(const Matrix& basis);
Vector to_weighted(const ObsFunction& f, const Distribution& pi);
ObsFunction from_weighted(const Vector& v, const Distribution& pi);

struct SpectralReport {
  double lambda = 0.0;   // additive gap on mean-zero functions
  double gamma = 0.0;    // multiplicative gap, 1 - ||P||_{L^2_0}
  double lambda2 = 0.0;  // next distinct eigenvalue above lambda
  double gamma2 = 0.0;   // next distinct value above gamma
  std::vector<double> eigvals;          // I - (P + P*)/2 on L^2(pi), ascending
  std::vector<double> singular_values;  // P on L^2_0(pi), descending
};

/// Requires pi strictly positive and stationary for P. Eigenvalues within
/// `cluster_tol` of lambda (or singular values within it of 1 - gamma)
/// count as the same eigenvalue.
SpectralReport spectral_report(const MarkovKernel& p, const Distribution& pi, double cluster_tol = tol::cluster);

enum class BasisTag { V, V_prime, V_perp, W, W_tilde, W_tilde_adjoint };

std::string to_string(BasisTag tag);

/// pi-orthonormal family of functions spanning a subspace.
struct SubspaceBasis {
  BasisTag tag;
  std::vector<ObsFunction> vectors;

  std::size_t dim() const { return vectors.size(); }
  /// Columns D^{1/2} v_i.
  Matrix weighted(const Distribution& pi) const;
  /// Orthogonal projector in weighted coordinates.
  Matrix projector(const Distribution& pi) const;
};

struct InvariantBases {
  SubspaceBasis V;        // functions constant on orbits
  SubspaceBasis V_prime;  // mean-zero part of V
  SubspaceBasis V_perp;   // orthogonal complement of V
};

/// Built from normalized orbit indicators of the group generated by `perms`.
InvariantBases invariant_basis(std::span<const Perm> perms, const Distribution& pi);
InvariantBases invariant_basis(const FiniteGroup& group, const Distribution& pi);

enum class GapSpace { W, W_tilde, W_tilde_adjoint };

/// Eigenspace of the additive gap (W), of I - sqrt(PP*) at gamma (W_tilde),
/// or of I - sqrt(P*P) at gamma (W_tilde_adjoint), restricted to mean-zero
/// functions.
SubspaceBasis gap_eigenspace(const MarkovKernel& p, const Distribution& pi, GapSpace which,
                             double cluster_tol = tol::cluster);

/// Spectral norm of P_A P_B P_A for orthogonal projectors in weighted
/// coordinates.
double projector_sandwich_norm(const Matrix& outer, const Matrix& inner);

struct OrbitGapBound {
  double bound = 0.0;
  double norm_V = 0.0;       // ||P_V P_W P_V||
  double norm_V_perp = 0.0;  // ||P_{V perp} P_W P_{V perp}||
  double lambda = 0.0;
  double lambda2 = 0.0;
  // Numerically nontrivial intersection of W with V or V perp; strict
  // improvement is then not certified.
  bool W_meets_V = false;
  bool W_meets_V_perp = false;
};

/// Lower bound on the additive gap of the orbit average. Requires pi
/// G-invariant and stationary for P.
OrbitGapBound overline_gap_bound(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi);

struct GammaBounds {
  double bound_la = 0.0;
  double bound_ra = 0.0;
  double beta = 0.0;        // ||P_V P_{W_tilde(P)} P_V||
  double beta_prime = 0.0;  // ||P_V P_{W_tilde(P*)} P_V||
  double gamma = 0.0;
  double gamma2 = 0.0;
};

/// Lower bounds on the multiplicative gaps of the left and right averages.
GammaBounds gamma_bounds_la_ra(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi);

} // namespace grpavg
