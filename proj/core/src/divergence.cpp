#include "grpavg/divergence.hpp"

#include <cmath>
#include <limits>

#include "grpavg/error.hpp"

namespace grpavg {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double max_abs_diff(const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double measure(Metric metric, const MarkovKernel& a, const MarkovKernel& b, const Distribution& pi) {
  switch (metric) {
  case Metric::KL: return kl_pi(a, b, pi);
  case Metric::HS2: return hs_norm_squared(a.matrix() - b.matrix(), pi);
  case Metric::F2: return (a.matrix() - b.matrix()).squaredNorm();
  }
  return 0.0;
}

PythagoreanCheck assemble(const MarkovKernel& p, const MarkovKernel& m, const MarkovKernel& avg,
                          const Distribution& pi, Metric metric, TargetClass cls) {
  PythagoreanCheck c;
  c.metric = metric;
  c.target_class = cls;
  c.lhs = measure(metric, p, m, pi);
  c.rhs_near = measure(metric, p, avg, pi);
  c.rhs_far = measure(metric, avg, m, pi);
  if (!std::isfinite(c.lhs) || !std::isfinite(c.rhs_near) || !std::isfinite(c.rhs_far)) {
    c.conclusive = false;
    c.residual = std::numeric_limits<double>::quiet_NaN();
  } else {
    c.residual = c.lhs - (c.rhs_near + c.rhs_far);
  }
  return c;
}

bool in_class(const MarkovKernel& k, const FiniteGroup& group, const Distribution& pi, TargetClass cls,
              const PairMeasure* nu) {
  if (cls == TargetClass::D_nu) {
    return max_abs_diff(double_average(k, group.elements(), *nu).matrix(), k.matrix()) <= tol::stochastic;
  }
  const InvarianceFlags f = invariance_class(k, std::span<const Perm>(group.elements()), pi);
  switch (cls) {
  case TargetClass::LGGinv: return f.in_LGGinv;
  case TargetClass::LGG: return f.in_LGG;
  case TargetClass::LI: return f.in_LI;
  case TargetClass::RI: return f.in_RI;
  case TargetClass::LI_and_RI: return f.in_LI && f.in_RI;
  case TargetClass::D_nu: break;
  }
  return false;
}

} // namespace

double kl_pi(const MarkovKernel& p, const MarkovKernel& m, const Distribution& pi) {
  require_same_size(p.size(), m.size(), "kl_pi");
  require_same_size(p.size(), pi.size(), "kl_pi");
  double total = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (pi[x] == 0.0) continue;
    for (std::size_t y = 0; y < p.size(); ++y) {
      const double a = p(x, y);
      if (a == 0.0) continue;
      const double b = m(x, y);
      if (b == 0.0) return inf;
      total += pi[x] * a * std::log(a / b);
    }
  }
  return total;
}

double hs_norm_squared(const Matrix& a, const Distribution& pi) {
  require_same_size(static_cast<std::size_t>(a.rows()), pi.size(), "hs_norm");
  pi.require_positive("hs_norm");
  const Vector& w = pi.weights();
  double total = 0.0;
  for (Eigen::Index x = 0; x < a.rows(); ++x)
    for (Eigen::Index y = 0; y < a.cols(); ++y) total += w[x] * a(x, y) * a(x, y) / w[y];
  return total;
}

double hs_norm(const MarkovKernel& p, const Distribution& pi) { return std::sqrt(hs_norm_squared(p.matrix(), pi)); }

double hs_dist(const MarkovKernel& p, const MarkovKernel& m, const Distribution& pi) {
  require_same_size(p.size(), m.size(), "hs_dist");
  return std::sqrt(hs_norm_squared(p.matrix() - m.matrix(), pi));
}

double frob_dist(const MarkovKernel& p, const MarkovKernel& m) {
  require_same_size(p.size(), m.size(), "frob_dist");
  return (p.matrix() - m.matrix()).norm();
}

double trace_pi(const MarkovKernel& p) { return p.matrix().trace(); }

std::string to_string(Metric m) {
  switch (m) {
  case Metric::KL: return "KL";
  case Metric::HS2: return "HS2";
  case Metric::F2: return "F2";
  }
  return "?";
}

std::string to_string(TargetClass c) {
  switch (c) {
  case TargetClass::LGGinv: return "LGGinv";
  case TargetClass::LGG: return "LGG";
  case TargetClass::LI: return "LI";
  case TargetClass::RI: return "RI";
  case TargetClass::LI_and_RI: return "LI_and_RI";
  case TargetClass::D_nu: return "D_nu";
  }
  return "?";
}

PythagoreanCheck pythagorean_check(const MarkovKernel& p, const MarkovKernel& m, const MarkovKernel& avg,
                                   const Distribution& pi, Metric metric, const FiniteGroup& group,
                                   TargetClass cls, const PairMeasure* nu) {
  require_same_size(p.size(), m.size(), "pythagorean_check");
  require_same_size(p.size(), avg.size(), "pythagorean_check");
  if (!is_pi_invariant(group, pi)) throw DomainError("pythagorean_check: pi is not G-invariant");
  if (cls == TargetClass::D_nu && nu == nullptr) throw DomainError("pythagorean_check: D_nu needs a pair measure");

  MarkovKernel expected = [&] {
    switch (cls) {
    case TargetClass::LGGinv: return special_average(p, group, AverageKind::orbit, pi);
    case TargetClass::LGG: return special_average(p, group, AverageKind::twisted, pi);
    case TargetClass::LI: return special_average(p, group, AverageKind::left, pi);
    case TargetClass::RI: return special_average(p, group, AverageKind::right, pi);
    case TargetClass::LI_and_RI: return special_average(p, group, AverageKind::independent, pi);
    case TargetClass::D_nu: break;
    }
    return double_average(p, group.elements(), *nu);
  }();
  if (max_abs_diff(expected.matrix(), avg.matrix()) > tol::stochastic) {
    throw DomainError("pythagorean_check: avg is not the " + to_string(cls) + " average of P");
  }
  if (!in_class(avg, group, pi, cls, nu)) {
    throw DomainError("pythagorean_check: hypothesis fails, the average of P is not in " + to_string(cls));
  }
  if (!in_class(m, group, pi, cls, nu)) {
    throw DomainError("pythagorean_check: M is not in " + to_string(cls));
  }
  return assemble(p, m, avg, pi, metric, cls);
}

PythagoreanCheck sd_pythagorean_check(const MarkovKernel& p, const MarkovKernel& m, const MarkovKernel& avg,
                                      const Distribution& pi, Metric metric, const FiniteGroup& group,
                                      TargetClass cls) {
  require_same_size(p.size(), m.size(), "sd_pythagorean_check");
  require_same_size(p.size(), avg.size(), "sd_pythagorean_check");
  Side side;
  switch (cls) {
  case TargetClass::LI: side = Side::left; break;
  case TargetClass::RI: side = Side::right; break;
  case TargetClass::LI_and_RI: side = Side::both; break;
  default: throw DomainError("sd_pythagorean_check: class must be LI, RI or LI_and_RI");
  }
  const MarkovKernel expected = sd_average(p, group, pi, side);
  if (max_abs_diff(expected.matrix(), avg.matrix()) > tol::stochastic) {
    throw DomainError("sd_pythagorean_check: avg is not Q-averaged P on side " + to_string(side));
  }
  const Matrix q = state_dependent_Q(group, pi).matrix();
  const Matrix& mm = m.matrix();
  const bool left_ok = max_abs_diff(q * mm, mm) <= tol::stochastic;
  const bool right_ok = max_abs_diff(mm * q, mm) <= tol::stochastic;
  const bool ok = side == Side::left ? left_ok : side == Side::right ? right_ok : (left_ok && right_ok);
  if (!ok) throw DomainError("sd_pythagorean_check: M is not in " + to_string(cls));
  return assemble(p, m, avg, pi, metric, cls);
}

double distance_to_isotropy(const MarkovKernel& p, const FiniteGroup& group, const Distribution& pi) {
  return kl_pi(p, special_average(p, group, AverageKind::orbit, pi), pi);
}

Distribution pi_G(const Distribution& pi, const FiniteGroup& group) {
  require_same_size(group.degree(), pi.size(), "pi_G");
  Vector w = Vector::Zero(static_cast<Eigen::Index>(pi.size()));
  for (const Perm& g : group.elements())
    for (std::size_t x = 0; x < pi.size(); ++x) w[static_cast<Eigen::Index>(x)] += pi[g[x]];
  return Distribution::normalized(w);
}

double kl_dist(const Distribution& pi, const Distribution& pi0) {
  require_same_size(pi.size(), pi0.size(), "kl_dist");
  double total = 0.0;
  for (std::size_t x = 0; x < pi.size(); ++x) {
    if (pi[x] == 0.0) continue;
    if (pi0[x] == 0.0) return inf;
    total += pi[x] * std::log(pi[x] / pi0[x]);
  }
  return total;
}

double required_sample_size(const Distribution& pi, const Distribution& pi0) { return std::exp(kl_dist(pi, pi0)); }

} // namespace grpavg
