#include "grpavg/spectral.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "grpavg/error.hpp"

namespace grpavg {

Matrix weighted_matrix(const MarkovKernel& p, const Distribution& pi) {
  require_same_size(p.size(), pi.size(), "weighted_matrix");
  pi.require_positive("weighted_matrix");
  const Vector s = pi.weights().cwiseSqrt();
  return s.asDiagonal() * p.matrix() * s.cwiseInverse().asDiagonal();
}

Matrix orthogonal_complement(const Matrix& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index k = basis.cols();
  if (k == 0) return Matrix::Identity(n, n);
  if (k >= n) return Matrix(n, 0);
  Eigen::HouseholderQR<Matrix> qr(basis);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  return q.rightCols(n - k);
}

Matrix centered_basis(const Distribution& pi) {
  Matrix u = pi.weights().cwiseSqrt();
  return orthogonal_complement(u);
}

Vector to_weighted(const ObsFunction& f, const Distribution& pi) {
  require_same_size(f.size(), pi.size(), "to_weighted");
  return pi.weights().cwiseSqrt().cwiseProduct(f.values());
}

ObsFunction from_weighted(const Vector& v, const Distribution& pi) {
  require_same_size(static_cast<std::size_t>(v.size()), pi.size(), "from_weighted");
  return ObsFunction(v.cwiseQuotient(pi.weights().cwiseSqrt()));
}

namespace {

struct CenteredSpectra {
  Matrix basis;              // B
  Eigen::VectorXd add_vals;  // ascending eigenvalues of B'(I - sym S)B
  Matrix add_vecs;
  Eigen::VectorXd sing;      // descending singular values of B' S B
  Matrix left, right;
};

CenteredSpectra centered_spectra(const MarkovKernel& p, const Distribution& pi) {
  pi.require_positive("spectral analysis");
  if (!is_stationary(p, pi)) throw DomainError("spectral analysis: kernel is not pi-stationary");
  CenteredSpectra cs;
  const Matrix s = weighted_matrix(p, pi);
  cs.basis = centered_basis(pi);
  if (cs.basis.cols() == 0) return cs;
  const Matrix s0 = cs.basis.transpose() * s * cs.basis;
  const Eigen::Index k = s0.rows();
  const Matrix a0 = Matrix::Identity(k, k) - 0.5 * (s0 + s0.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a0 + a0.transpose()));
  cs.add_vals = es.eigenvalues();
  cs.add_vecs = es.eigenvectors();
  Eigen::JacobiSVD<Matrix> svd(s0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  cs.sing = svd.singularValues();
  cs.left = svd.matrixU();
  cs.right = svd.matrixV();
  return cs;
}

std::size_t cluster_size_ascending(const Eigen::VectorXd& v, double tol) {
  Eigen::Index i = 1;
  while (i < v.size() && v[i] <= v[0] + tol) ++i;
  return static_cast<std::size_t>(i);
}

std::size_t cluster_size_descending(const Eigen::VectorXd& v, double tol) {
  Eigen::Index i = 1;
  while (i < v.size() && v[i] >= v[0] - tol) ++i;
  return static_cast<std::size_t>(i);
}

SubspaceBasis columns_to_basis(BasisTag tag, const Matrix& weighted_cols, const Distribution& pi) {
  SubspaceBasis b{tag, {}};
  for (Eigen::Index j = 0; j < weighted_cols.cols(); ++j) {
    b.vectors.push_back(from_weighted(weighted_cols.col(j), pi));
  }
  return b;
}

} // namespace

SpectralReport spectral_report(const MarkovKernel& p, const Distribution& pi, double cluster_tol) {
  const CenteredSpectra cs = centered_spectra(p, pi);
  SpectralReport r;
  const Matrix s = weighted_matrix(p, pi);
  const auto n = s.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> full(Matrix::Identity(n, n) - 0.5 * (s + s.transpose()),
                                             Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < n; ++i) r.eigvals.push_back(full.eigenvalues()[i]);
  if (cs.basis.cols() == 0) {
    r.lambda = r.lambda2 = r.gamma = r.gamma2 = 1.0;
    return r;
  }
  r.lambda = std::clamp(cs.add_vals[0], 0.0, 2.0);
  const std::size_t ka = cluster_size_ascending(cs.add_vals, cluster_tol);
  r.lambda2 = ka < static_cast<std::size_t>(cs.add_vals.size()) ? cs.add_vals[static_cast<Eigen::Index>(ka)]
                                                                 : r.lambda;
  for (Eigen::Index i = 0; i < cs.sing.size(); ++i) r.singular_values.push_back(cs.sing[i]);
  r.gamma = std::clamp(1.0 - cs.sing[0], 0.0, 1.0);
  const std::size_t ks = cluster_size_descending(cs.sing, cluster_tol);
  r.gamma2 = ks < static_cast<std::size_t>(cs.sing.size()) ? 1.0 - cs.sing[static_cast<Eigen::Index>(ks)]
                                                           : r.gamma;
  r.gamma2 = std::clamp(r.gamma2, 0.0, 1.0);
  return r;
}

std::string to_string(BasisTag tag) {
  switch (tag) {
  case BasisTag::V: return "V";
  case BasisTag::V_prime: return "V'";
  case BasisTag::V_perp: return "V_perp";
  case BasisTag::W: return "W";
  case BasisTag::W_tilde: return "W_tilde";
  case BasisTag::W_tilde_adjoint: return "W_tilde_adjoint";
  }
  return "?";
}

Matrix SubspaceBasis::weighted(const Distribution& pi) const {
  Matrix m(static_cast<Eigen::Index>(pi.size()), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = to_weighted(vectors[j], pi);
  return m;
}

Matrix SubspaceBasis::projector(const Distribution& pi) const {
  const Matrix w = weighted(pi);
  return w * w.transpose();
}

InvariantBases invariant_basis(std::span<const Perm> perms, const Distribution& pi) {
  pi.require_positive("invariant_basis");
  const auto orbs = orbits(perms);
  require_same_size(perms.front().size(), pi.size(), "invariant_basis");
  const auto n = static_cast<Eigen::Index>(pi.size());
  const auto k = static_cast<Eigen::Index>(orbs.size());
  Matrix u = Matrix::Zero(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double mass = 0.0;
    for (std::size_t x : orbs[static_cast<std::size_t>(j)]) mass += pi[x];
    for (std::size_t x : orbs[static_cast<std::size_t>(j)]) {
      u(static_cast<Eigen::Index>(x), j) = std::sqrt(pi[x] / mass);
    }
  }
  // sqrt(pi) = sum_j sqrt(pi(O_j)) u_j; remove that direction inside span(u).
  Vector c(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double mass = 0.0;
    for (std::size_t x : orbs[static_cast<std::size_t>(j)]) mass += pi[x];
    c[j] = std::sqrt(mass);
  }
  const Matrix cc = c;
  const Matrix vprime = u * orthogonal_complement(cc);
  return {columns_to_basis(BasisTag::V, u, pi), columns_to_basis(BasisTag::V_prime, vprime, pi),
          columns_to_basis(BasisTag::V_perp, orthogonal_complement(u), pi)};
}

InvariantBases invariant_basis(const FiniteGroup& group, const Distribution& pi) {
  return invariant_basis(std::span<const Perm>(group.elements()), pi);
}

SubspaceBasis gap_eigenspace(const MarkovKernel& p, const Distribution& pi, GapSpace which, double cluster_tol) {
  const CenteredSpectra cs = centered_spectra(p, pi);
  const BasisTag tag = which == GapSpace::W         ? BasisTag::W
                       : which == GapSpace::W_tilde ? BasisTag::W_tilde
                                                    : BasisTag::W_tilde_adjoint;
  if (cs.basis.cols() == 0) return {tag, {}};
  if (which == GapSpace::W) {
    const auto m = static_cast<Eigen::Index>(cluster_size_ascending(cs.add_vals, cluster_tol));
    return columns_to_basis(tag, cs.basis * cs.add_vecs.leftCols(m), pi);
  }
  const auto m = static_cast<Eigen::Index>(cluster_size_descending(cs.sing, cluster_tol));
  const Matrix& vecs = which == GapSpace::W_tilde ? cs.left : cs.right;
  return columns_to_basis(tag, cs.basis * vecs.leftCols(m), pi);
}

double projector_sandwich_norm(const Matrix& outer, const Matrix& inner) {
  const Matrix t = outer * inner * outer;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly);
  return std::clamp(es.eigenvalues().cwiseAbs().maxCoeff(), 0.0, 1.0);
}

OrbitGapBound overline_gap_bound(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi) {
  if (!is_pi_invariant(group, pi)) throw DomainError("overline_gap_bound: pi is not G-invariant");
  const SpectralReport rep = spectral_report(p, pi);
  const InvariantBases vb = invariant_basis(group, pi);
  const Matrix pw = gap_eigenspace(p, pi, GapSpace::W).projector(pi);
  const Matrix pv = vb.V.projector(pi);
  const Matrix pvp = vb.V_perp.projector(pi);
  OrbitGapBound out;
  out.lambda = rep.lambda;
  out.lambda2 = rep.lambda2;
  out.norm_V = projector_sandwich_norm(pv, pw);
  out.norm_V_perp = projector_sandwich_norm(pvp, pw);
  out.bound = std::min(out.norm_V * rep.lambda + (1.0 - out.norm_V) * rep.lambda2,
                       out.norm_V_perp * rep.lambda + (1.0 - out.norm_V_perp) * rep.lambda2);
  out.W_meets_V = out.norm_V >= 1.0 - tol::cluster;
  out.W_meets_V_perp = out.norm_V_perp >= 1.0 - tol::cluster;
  return out;
}

GammaBounds gamma_bounds_la_ra(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi) {
  if (!is_pi_invariant(group, pi)) throw DomainError("gamma_bounds_la_ra: pi is not G-invariant");
  const SpectralReport rep = spectral_report(p, pi);
  const Matrix pv = invariant_basis(group, pi).V.projector(pi);
  GammaBounds out;
  out.gamma = rep.gamma;
  out.gamma2 = rep.gamma2;
  out.beta = projector_sandwich_norm(pv, gap_eigenspace(p, pi, GapSpace::W_tilde).projector(pi));
  out.beta_prime = projector_sandwich_norm(pv, gap_eigenspace(p, pi, GapSpace::W_tilde_adjoint).projector(pi));
  const double a = 1.0 - rep.gamma;
  const double b = 1.0 - rep.gamma2;
  out.bound_la = 1.0 - std::sqrt(out.beta * a * a + (1.0 - out.beta) * b * b);
  out.bound_ra = 1.0 - std::sqrt(out.beta_prime * a * a + (1.0 - out.beta_prime) * b * b);
  return out;
}

} // namespace grpavg
