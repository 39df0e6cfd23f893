#include "grpavg/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "grpavg/averaging.hpp"
#include "grpavg/error.hpp"
#include "grpavg/spectral.hpp"

namespace grpavg {

// Asymptotic variance

namespace {

ObsFunction centered(const ObsFunction& f, const Distribution& pi, bool& removed) {
  const double mean = pi.weights().dot(f.values());
  removed = std::abs(mean) > tol::exact;
  if (!removed) return f;
  return ObsFunction(f.values().array() - mean);
}

double spectral_radius_centered(const MarkovKernel& p, const Distribution& pi) {
  const Matrix b = centered_basis(pi);
  if (b.cols() == 0) return 0.0;
  const Matrix s0 = b.transpose() * weighted_matrix(p, pi) * b;
  Eigen::EigenSolver<Matrix> es(s0, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace

VarianceDetail asymptotic_variance_detail(const ObsFunction& f_in, const MarkovKernel& p, const Distribution& pi) {
  require_same_size(f_in.size(), p.size(), "asymptotic_variance");
  require_same_size(pi.size(), p.size(), "asymptotic_variance");
  pi.require_positive("asymptotic_variance");
  if (!is_stationary(p, pi)) throw DomainError("asymptotic_variance: kernel is not pi-stationary");
  VarianceDetail out;
  const ObsFunction f = centered(f_in, pi, out.mean_removed);
  if (f.values().cwiseAbs().maxCoeff() == 0.0) return out;
  if (spectral_radius_centered(p, pi) >= 1.0 - tol::stochastic) {
    throw DomainError("asymptotic_variance: unit spectral radius on mean-zero functions");
  }
  const auto n = static_cast<Eigen::Index>(p.size());
  // (I - P + Pi) h = f has the unique mean-zero solution of (I - P) h = f.
  const Matrix a = Matrix::Identity(n, n) - p.matrix() + Vector::Ones(n) * pi.weights().transpose();
  const Vector h = a.fullPivLu().solve(f.values());
  out.residual = ((Matrix::Identity(n, n) - p.matrix()) * h - f.values()).cwiseAbs().maxCoeff();
  const Vector& w = pi.weights();
  out.value = 2.0 * (w.array() * f.values().array() * h.array()).sum() -
              (w.array() * f.values().array().square()).sum();

  if (is_reversible(p, pi)) {
    const Matrix b = centered_basis(pi);
    const Matrix s0 = b.transpose() * weighted_matrix(p, pi) * b;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s0 + s0.transpose()));
    const Vector c = es.eigenvectors().transpose() * (b.transpose() * to_weighted(f, pi));
    double v = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      const double mu = es.eigenvalues()[i];
      v += (1.0 + mu) / (1.0 - mu) * c[i] * c[i];
    }
    out.spectral_value = v;
  }
  return out;
}

double asymptotic_variance(const ObsFunction& f, const MarkovKernel& p, const Distribution& pi) {
  return asymptotic_variance_detail(f, p, pi).value;
}

double worst_case_asymptotic_variance(const MarkovKernel& p, const Distribution& pi) {
  const double lambda = spectral_report(p, pi).lambda;
  if (!(lambda > 0.0)) throw DomainError("worst_case_asymptotic_variance: zero spectral gap");
  return (2.0 - lambda) / lambda;
}

VarianceReduction asympvar_reduction(const ObsFunction& f, const MarkovKernel& p, const FiniteGroup& group,
                                     const PairMeasure& nu, const Distribution& pi) {
  require_same_size(f.size(), p.size(), "asympvar_reduction");
  if (!is_reversible(p, pi)) throw DomainError("asympvar_reduction: P is not pi-reversible");
  if (!is_pi_invariant(group, pi)) throw DomainError("asympvar_reduction: pi is not G-invariant");
  if (!has_uniform_marginals(group, nu) || !is_measure_symmetric(group, nu)) {
    throw DomainError("asympvar_reduction: nu needs uniform marginals and (g,h) ~ (h^-1, g^-1)");
  }
  if (std::abs(weighted_inner(f, ObsFunction::constant(f.size(), 1.0), pi)) > tol::stochastic) {
    throw DomainError("asympvar_reduction: f does not have mean zero");
  }
  for (const Perm& g : group.elements()) {
    for (std::size_t x = 0; x < f.size(); ++x) {
      if (std::abs(f[g[x]] - f[x]) > tol::stochastic) throw DomainError("asympvar_reduction: f is not G-invariant");
    }
  }

  VarianceReduction out;
  out.v_before = asymptotic_variance(f, p, pi);
  out.v_after = asymptotic_variance(f, double_average(p, group.elements(), nu), pi);
  out.observed = out.v_before - out.v_after;

  // A = I - P restricted to mean-zero functions, in weighted coordinates.
  const Matrix b = centered_basis(pi);
  const Eigen::Index k = b.cols();
  const Matrix s0 = b.transpose() * weighted_matrix(p, pi) * b;
  const Matrix a = Matrix::Identity(k, k) - 0.5 * (s0 + s0.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.eigenvalues().minCoeff() <= tol::stochastic) throw DomainError("asympvar_reduction: A is singular on L^2_0");
  const Matrix a_inv_sqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                            es.eigenvectors().transpose();
  const Matrix vperp = b.transpose() * invariant_basis(group, pi).V_perp.weighted(pi);
  const Vector z = a_inv_sqrt * (b.transpose() * to_weighted(f, pi));
  if (vperp.cols() == 0) return out;
  const Matrix image = a_inv_sqrt * vperp;
  Eigen::HouseholderQR<Matrix> qr(image);
  const Matrix q = qr.householderQ() * Matrix::Identity(image.rows(), image.cols());
  out.predicted = 2.0 * (q.transpose() * z).squaredNorm();
  return out;
}

// Cheeger

CheegerResult cheeger(const MarkovKernel& p, const Distribution& pi) {
  const std::size_t n = p.size();
  require_same_size(n, pi.size(), "cheeger");
  if (n > max_cheeger_states) throw LimitError("cheeger: more than 20 states");
  if (!is_stationary(p, pi)) throw DomainError("cheeger: kernel is not pi-stationary");
  const Matrix flow = pi.weights().asDiagonal() * p.matrix();
  const double half = 0.5 + tol::exact;

  std::vector<double> r(n, 0.0), c(n, 0.0);
  double mass = 0.0, inner = 0.0;
  std::uint32_t mask = 0;
  auto recompute = [&] {
    std::fill(r.begin(), r.end(), 0.0);
    std::fill(c.begin(), c.end(), 0.0);
    mass = inner = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      if (!(mask >> x & 1u)) continue;
      mass += pi[x];
      for (std::size_t w = 0; w < n; ++w) {
        r[w] += flow(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(x));
        c[w] += flow(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(w));
        if (mask >> w & 1u) inner += flow(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(w));
      }
    }
  };
  auto members = [n](std::uint32_t m) {
    std::vector<std::size_t> s;
    for (std::size_t x = 0; x < n; ++x)
      if (m >> x & 1u) s.push_back(x);
    return s;
  };

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 0;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto z = static_cast<std::size_t>(std::countr_zero(k));
    const auto zi = static_cast<Eigen::Index>(z);
    const bool adding = !(mask >> z & 1u);
    if (adding) {
      inner += r[z] + c[z] + flow(zi, zi);
      mass += pi[z];
      mask |= 1u << z;
      for (std::size_t w = 0; w < n; ++w) {
        r[w] += flow(static_cast<Eigen::Index>(w), zi);
        c[w] += flow(zi, static_cast<Eigen::Index>(w));
      }
    } else {
      for (std::size_t w = 0; w < n; ++w) {
        r[w] -= flow(static_cast<Eigen::Index>(w), zi);
        c[w] -= flow(zi, static_cast<Eigen::Index>(w));
      }
      inner -= r[z] + c[z] + flow(zi, zi);
      mass -= pi[z];
      mask &= ~(1u << z);
    }
    if ((k & 4095u) == 0) recompute();
    if (mask == 0 || mass > half) continue;
    const double v = (mass - inner) / mass;
    if (v < best - 1e-13) {
      best = v;
      best_mask = mask;
    } else if (v <= best + 1e-13 && members(mask) < members(best_mask)) {
      best = std::min(best, v);
      best_mask = mask;
    }
  }
  CheegerResult out;
  out.argmin_set = members(best_mask);
  double m = 0.0, in = 0.0;
  for (std::size_t x : out.argmin_set) {
    m += pi[x];
    for (std::size_t y : out.argmin_set) in += flow(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  out.phi = (m - in) / m;
  return out;
}

// Mixing

std::string to_string(Norm p) {
  switch (p) {
  case Norm::L1: return "1";
  case Norm::L2: return "2";
  case Norm::Linf: return "inf";
  }
  return "?";
}

Norm norm_from_string(const std::string& name) {
  if (name == "1" || name == "L1") return Norm::L1;
  if (name == "2" || name == "L2") return Norm::L2;
  if (name == "inf" || name == "Linf") return Norm::Linf;
  throw DomainError("unknown norm '" + name + "'");
}

double worst_case_distance(const Matrix& pt, const Distribution& pi, Norm p) {
  pi.require_positive("worst_case_distance");
  const Vector& w = pi.weights();
  double worst = 0.0;
  for (Eigen::Index x = 0; x < pt.rows(); ++x) {
    double d = 0.0;
    for (Eigen::Index y = 0; y < pt.cols(); ++y) {
      const double dev = pt(x, y) / w[y] - 1.0;
      switch (p) {
      case Norm::L1: d += w[y] * std::abs(dev); break;
      case Norm::L2: d += w[y] * dev * dev; break;
      case Norm::Linf: d = std::max(d, std::abs(dev)); break;
      }
    }
    if (p == Norm::L2) d = std::sqrt(d);
    worst = std::max(worst, d);
  }
  return worst;
}

double lp_distance(const MarkovKernel& p, std::uint64_t t, Norm norm, const Distribution& pi) {
  require_same_size(p.size(), pi.size(), "lp_distance");
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix result = Matrix::Identity(n, n);
  Matrix base = p.matrix();
  while (t > 0) {
    if (t & 1u) result = result * base;
    t >>= 1;
    if (t > 0) base = base * base;
  }
  return worst_case_distance(result, pi, norm);
}

MixingCurve mixing_curve(const MarkovKernel& p, const Distribution& pi, Norm norm, const std::vector<double>& eps,
                         std::uint64_t t_max) {
  require_same_size(p.size(), pi.size(), "mixing_curve");
  MixingCurve curve;
  curve.p = norm;
  const auto n = static_cast<Eigen::Index>(p.size());
  Matrix pt = Matrix::Identity(n, n);
  curve.distances.push_back(worst_case_distance(pt, pi, norm));
  for (std::uint64_t t = 1; t <= t_max; ++t) {
    pt = pt * p.matrix();
    curve.distances.push_back(worst_case_distance(pt, pi, norm));
  }
  for (double e : eps) {
    std::optional<std::uint64_t> hit;
    for (std::uint64_t t = 1; t < curve.distances.size(); ++t) {
      if (curve.distances[t] <= e) {
        hit = t;
        break;
      }
    }
    curve.t_mix.emplace_back(e, hit);
  }
  return curve;
}

std::optional<std::uint64_t> mixing_time(const MarkovKernel& p, const Distribution& pi, Norm norm, double eps,
                                         std::uint64_t t_max) {
  require_same_size(p.size(), pi.size(), "mixing_time");
  if (t_max == 0) return std::nullopt;
  std::vector<Matrix> powers{p.matrix()};  // powers[k] = P^{2^k}
  if (worst_case_distance(powers[0], pi, norm) <= eps) return 1;
  std::uint64_t span = 1;
  while (true) {
    if (span >= t_max) return std::nullopt;  // d(span) > eps with span >= t_max
    powers.push_back(powers.back() * powers.back());
    span *= 2;
    if (worst_case_distance(powers.back(), pi, norm) <= eps) break;
  }
  // d(span / 2) > eps >= d(span): bisect using the stored powers.
  std::uint64_t lo = span / 2;
  Matrix cur = powers[powers.size() - 2];
  for (std::size_t k = powers.size() - 2; k-- > 0;) {
    Matrix cand = cur * powers[k];
    if (worst_case_distance(cand, pi, norm) > eps) {
      cur = std::move(cand);
      lo += std::uint64_t{1} << k;
    }
  }
  const std::uint64_t t = lo + 1;
  if (t > t_max) return std::nullopt;
  return t;
}

// Sampling

Trajectory sample_path(const MarkovKernel& p, std::size_t x0, std::size_t steps, std::uint64_t seed) {
  if (x0 >= p.size()) throw DimensionError("sample_path: start state out of range");
  std::mt19937_64 rng(seed);
  Trajectory path;
  path.seed = seed;
  path.states.reserve(steps + 1);
  path.states.push_back(x0);
  std::size_t x = x0;
  for (std::size_t t = 0; t < steps; ++t) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    double cum = 0.0;
    std::size_t next = p.size();
    std::size_t last_positive = x;
    for (std::size_t y = 0; y < p.size(); ++y) {
      const double w = p(x, y);
      if (w <= 0.0) continue;
      last_positive = y;
      cum += w;
      if (u < cum) {
        next = y;
        break;
      }
    }
    x = next == p.size() ? last_positive : next;
    path.states.push_back(x);
  }
  return path;
}

MarkovKernel pmmh_kernel(const Distribution& pi, const FiniteGroup& group, const MarkovKernel& proposal) {
  require_same_size(pi.size(), proposal.size(), "pmmh_kernel");
  require_same_size(pi.size(), group.degree(), "pmmh_kernel");
  pi.require_positive("pmmh_kernel");
  const ProductIndex idx{pi.size(), group.order()};
  if (idx.size() > max_dense_states) throw LimitError("pmmh_kernel: extended space too large");
  const auto N = static_cast<Eigen::Index>(idx.size());
  const double inv = 1.0 / static_cast<double>(group.order());
  Matrix k = Matrix::Zero(N, N);
  for (std::size_t x = 0; x < pi.size(); ++x) {
    for (std::size_t g = 0; g < group.order(); ++g) {
      const auto from = static_cast<Eigen::Index>(idx.encode(x, g));
      const double here = pi[group[g][x]];
      double moved = 0.0;
      for (std::size_t x2 = 0; x2 < pi.size(); ++x2) {
        const double q_fwd = proposal(x, x2);
        if (q_fwd == 0.0) continue;
        const double q_back = proposal(x2, x);
        for (std::size_t g2 = 0; g2 < group.order(); ++g2) {
          if (x2 == x && g2 == g) continue;
          const double alpha = std::min(1.0, pi[group[g2][x2]] * q_back / (here * q_fwd));
          const double w = q_fwd * inv * alpha;
          k(from, static_cast<Eigen::Index>(idx.encode(x2, g2))) = w;
          moved += w;
        }
      }
      k(from, from) = 1.0 - moved;
    }
  }
  return MarkovKernel(std::move(k));
}

} // namespace grpavg
