#include "grpavg/averaging.hpp"

#include <cmath>

#include "grpavg/error.hpp"

namespace grpavg {

std::string to_string(AverageKind kind) {
  switch (kind) {
  case AverageKind::orbit: return "orbit";
  case AverageKind::twisted: return "twisted";
  case AverageKind::left: return "left";
  case AverageKind::right: return "right";
  case AverageKind::independent: return "independent";
  }
  return "?";
}

AverageKind average_kind_from_string(const std::string& name) {
  for (AverageKind k : {AverageKind::orbit, AverageKind::twisted, AverageKind::left, AverageKind::right,
                        AverageKind::independent}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown average kind '" + name + "'");
}

PairKind pair_kind_of(AverageKind kind) {
  switch (kind) {
  case AverageKind::orbit: return PairKind::conjugation;
  case AverageKind::twisted: return PairKind::twisted;
  case AverageKind::left: return PairKind::left;
  case AverageKind::right: return PairKind::right;
  case AverageKind::independent: return PairKind::product;
  }
  return PairKind::product;
}

std::string to_string(Side side) {
  switch (side) {
  case Side::left: return "left";
  case Side::right: return "right";
  case Side::both: return "both";
  }
  return "?";
}

namespace {

void accumulate_sandwich(Matrix& acc, const Matrix& p, const Perm& g, const Perm& h_inv, double w) {
  const auto n = static_cast<Eigen::Index>(g.size());
  for (Eigen::Index x = 0; x < n; ++x) {
    const auto gx = static_cast<Eigen::Index>(g[static_cast<std::size_t>(x)]);
    for (Eigen::Index y = 0; y < n; ++y) {
      acc(x, y) += w * p(gx, static_cast<Eigen::Index>(h_inv[static_cast<std::size_t>(y)]));
    }
  }
}

void require_invariant(const FiniteGroup& group, const Distribution& pi, const char* op) {
  if (!is_pi_invariant(group, pi)) {
    throw DomainError(std::string(op) + ": pi is not G-invariant; use the state-dependent averages instead");
  }
}

} // namespace

MarkovKernel sandwich(const MarkovKernel& p, const Perm& g, const Perm& h) {
  require_same_size(p.size(), g.size(), "sandwich");
  require_same_size(p.size(), h.size(), "sandwich");
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix acc = Matrix::Zero(n, n);
  accumulate_sandwich(acc, p.matrix(), g, h.inverse(), 1.0);
  return MarkovKernel(std::move(acc));
}

MarkovKernel double_average(const MarkovKernel& p, std::span<const Perm> perms, const PairMeasure& nu) {
  if (perms.size() != nu.support_size()) {
    throw DimensionError("double_average: measure indexes " + std::to_string(nu.support_size()) +
                         " permutations but " + std::to_string(perms.size()) + " were given");
  }
  for (const Perm& g : perms) require_same_size(p.size(), g.size(), "double_average");
  std::vector<Perm> inverses;
  inverses.reserve(perms.size());
  for (const Perm& g : perms) inverses.push_back(g.inverse());

  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix acc = Matrix::Zero(n, n);
  for (const auto& a : nu.atoms()) {
    if (a.weight == 0.0) continue;
    accumulate_sandwich(acc, p.matrix(), perms[a.left], inverses[a.right], a.weight);
  }
  return MarkovKernel(std::move(acc));
}

MarkovKernel special_average(const MarkovKernel& p, const FiniteGroup& group, AverageKind kind,
                             const Distribution& pi) {
  require_same_size(p.size(), pi.size(), "special_average");
  require_invariant(group, pi, "special_average");
  return double_average(p, group.elements(), pair_measure(group, pair_kind_of(kind)));
}

MarkovKernel special_average(const MarkovKernel& p, const FiniteGroup& group, const PairMeasure& nu,
                             const Distribution& pi) {
  require_same_size(p.size(), pi.size(), "special_average");
  require_invariant(group, pi, "special_average");
  return double_average(p, group.elements(), nu);
}

MarkovKernel state_dependent_Q(const FiniteGroup& group, const Distribution& pi, ZeroMass policy) {
  require_same_size(group.degree(), pi.size(), "state_dependent_Q");
  if (policy == ZeroMass::reject) pi.require_positive("state_dependent_Q");
  const auto n = static_cast<Eigen::Index>(pi.size());
  Matrix q = Matrix::Zero(n, n);
  for (std::size_t x = 0; x < pi.size(); ++x) {
    double z = 0.0;
    for (const Perm& g : group.elements()) z += pi[g[x]];
    const bool null_orbit = !(z > 0.0);
    if (null_orbit && policy != ZeroMass::uniform_null_orbit)
      throw DomainError("state_dependent_Q: orbit of state " + std::to_string(x) + " has zero mass");
    const double uniform = 1.0 / static_cast<double>(group.order());
    for (const Perm& g : group.elements()) {
      const std::size_t y = g[x];
      q(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) += null_orbit ? uniform : pi[y] / z;
    }
  }
  return MarkovKernel(std::move(q));
}

MarkovKernel sd_average(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi, Side side) {
  require_same_size(p.size(), pi.size(), "sd_average");
  if (!is_stationary(p, pi)) throw DomainError("sd_average: kernel is not pi-stationary");
  const MarkovKernel q = state_dependent_Q(group, pi);
  switch (side) {
  case Side::left: return compose(q, p);
  case Side::right: return compose(p, q);
  case Side::both: return compose(compose(q, p), q);
  }
  throw DomainError("sd_average: unknown side");
}

Distribution extended_target(const FiniteGroup& group, const Distribution& pi) {
  require_same_size(group.degree(), pi.size(), "extended_target");
  const ProductIndex idx{pi.size(), group.order()};
  Vector w(static_cast<Eigen::Index>(idx.size()));
  const double inv = 1.0 / static_cast<double>(group.order());
  for (std::size_t x = 0; x < pi.size(); ++x)
    for (std::size_t g = 0; g < group.order(); ++g)
      w[static_cast<Eigen::Index>(idx.encode(x, g))] = pi[group[g][x]] * inv;
  return Distribution(std::move(w));
}

MarkovKernel metropolis_average_kernel(const FiniteGroup& group, const Distribution& pi) {
  require_same_size(group.degree(), pi.size(), "metropolis_average_kernel");
  pi.require_positive("metropolis_average_kernel");
  const ProductIndex idx{pi.size(), group.order()};
  if (idx.size() > max_dense_states) {
    throw LimitError("metropolis_average_kernel: extended space has " + std::to_string(idx.size()) + " states");
  }
  const auto N = static_cast<Eigen::Index>(idx.size());
  const double inv = 1.0 / static_cast<double>(group.order());
  Matrix k = Matrix::Zero(N, N);
  for (std::size_t x = 0; x < pi.size(); ++x) {
    for (std::size_t g = 0; g < group.order(); ++g) {
      const auto from = static_cast<Eigen::Index>(idx.encode(x, g));
      const double here = pi[group[g][x]];
      double off = 0.0;
      for (std::size_t h = 0; h < group.order(); ++h) {
        if (h == g) continue;
        const double p = inv * std::min(1.0, pi[group[h][x]] / here);
        k(from, static_cast<Eigen::Index>(idx.encode(x, h))) = p;
        off += p;
      }
      k(from, from) = 1.0 - off;
    }
  }
  return MarkovKernel(std::move(k));
}

namespace {

bool close(const Matrix& a, const Matrix& b, double tol) { return (a - b).cwiseAbs().maxCoeff() <= tol; }

} // namespace

InvarianceFlags invariance_class(const MarkovKernel& p, std::span<const Perm> perms, const Distribution& pi,
                                 double tol) {
  require_same_size(p.size(), pi.size(), "invariance_class");
  InvarianceFlags f;
  f.in_LGGinv = f.in_LGG = f.in_LI = f.in_RI = true;
  f.generators_only = true;
  const Matrix& m = p.matrix();
  for (const Perm& g : perms) {
    require_same_size(p.size(), g.size(), "invariance_class");
    const Perm gi = g.inverse();
    const Perm e = Perm::identity(g.size());
    f.in_LGGinv = f.in_LGGinv && close(sandwich(p, g, gi).matrix(), m, tol);
    f.in_LGG = f.in_LGG && close(sandwich(p, g, g).matrix(), m, tol);
    f.in_LI = f.in_LI && close(sandwich(p, g, e).matrix(), m, tol);
    f.in_RI = f.in_RI && close(sandwich(p, e, g).matrix(), m, tol);
  }
  return f;
}

InvarianceFlags invariance_class(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi,
                                 double tol) {
  InvarianceFlags f = invariance_class(p, std::span<const Perm>(group.elements()), pi, tol);
  f.generators_only = false;
  if (pi.strictly_positive()) {
    const MarkovKernel q = state_dependent_Q(group, pi);
    f.sd_left_fixed = close(compose(q, p).matrix(), p.matrix(), tol);
    f.sd_right_fixed = close(compose(p, q).matrix(), p.matrix(), tol);
  }
  return f;
}

} // namespace grpavg
