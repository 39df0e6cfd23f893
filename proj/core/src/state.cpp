#include "grpavg/state.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "grpavg/error.hpp"

namespace grpavg {

namespace {

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

} // namespace

void require_same_size(std::size_t a, std::size_t b, std::string_view op) {
  if (a != b) {
    throw DimensionError(std::string(op) + ": size mismatch (" + std::to_string(a) + " vs " +
                         std::to_string(b) + ")");
  }
}

// StateSpace

StateSpace::StateSpace(std::size_t n, std::vector<std::string> labels)
    : n_(n), labels_(std::move(labels)) {
  if (n_ == 0) throw DomainError("StateSpace: n must be positive");
  if (!labels_.empty()) {
    if (labels_.size() != n_) throw DimensionError("StateSpace: label count differs from n");
    std::set<std::string> seen(labels_.begin(), labels_.end());
    if (seen.size() != labels_.size()) throw DomainError("StateSpace: labels must be distinct");
  }
}

StateSpace StateSpace::signed_range(int half_width) {
  if (half_width < 0) throw DomainError("StateSpace::signed_range: negative half width");
  std::vector<std::string> labels;
  for (int x = -half_width; x <= half_width; ++x) labels.push_back(std::to_string(x));
  return StateSpace(static_cast<std::size_t>(2 * half_width + 1), std::move(labels));
}

std::string StateSpace::label(std::size_t x) const {
  if (x >= n_) throw DimensionError("StateSpace::label: index out of range");
  return labels_.empty() ? std::to_string(x) : labels_[x];
}

// Distribution

Distribution::Distribution(Vector weights, double tol) : w_(std::move(weights)) {
  if (w_.size() == 0) throw DomainError("Distribution: empty weight vector");
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (!std::isfinite(w_[i]) || w_[i] < 0.0) {
      throw DomainError("Distribution: weight " + std::to_string(i) + " is negative or not finite");
    }
  }
  const double s = w_.sum();
  if (std::abs(s - 1.0) > tol) {
    throw DomainError("Distribution: weights sum to " + fmt_double(s));
  }
}

Distribution Distribution::uniform(std::size_t n) {
  if (n == 0) throw DomainError("Distribution::uniform: n must be positive");
  return Distribution(Vector::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n)));
}

Distribution Distribution::normalized(const Vector& mass) {
  const double s = mass.sum();
  if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("Distribution::normalized: total mass must be positive");
  return Distribution(mass / s);
}

bool Distribution::strictly_positive() const { return (w_.array() > 0.0).all(); }

void Distribution::require_positive(std::string_view op) const {
  for (Eigen::Index i = 0; i < w_.size(); ++i) {
    if (!(w_[i] > 0.0)) {
      throw DomainError(std::string(op) + ": state " + std::to_string(i) + " has zero mass");
    }
  }
}

// ObsFunction

ObsFunction::ObsFunction(Vector values) : v_(std::move(values)) {
  for (Eigen::Index i = 0; i < v_.size(); ++i) {
    if (!std::isfinite(v_[i])) throw DomainError("ObsFunction: entry " + std::to_string(i) + " is not finite");
  }
}

ObsFunction::ObsFunction(std::initializer_list<double> values)
    : ObsFunction(Vector::Map(values.begin(), static_cast<Eigen::Index>(values.size()))) {}

ObsFunction ObsFunction::constant(std::size_t n, double c) {
  return ObsFunction(Vector::Constant(static_cast<Eigen::Index>(n), c));
}

// MarkovKernel

MarkovKernel::MarkovKernel(Matrix rows, double tol) : m_(std::move(rows)) {
  if (m_.rows() == 0 || m_.rows() != m_.cols()) {
    throw DimensionError("MarkovKernel: matrix must be square and nonempty");
  }
  for (Eigen::Index x = 0; x < m_.rows(); ++x) {
    for (Eigen::Index y = 0; y < m_.cols(); ++y) {
      double& v = m_(x, y);
      if (!std::isfinite(v)) throw DomainError("MarkovKernel: non-finite entry");
      if (v < 0.0) {
        if (v < -tol::clip) {
          throw DomainError("MarkovKernel: negative entry " + fmt_double(v) + " at (" + std::to_string(x) +
                            "," + std::to_string(y) + ")");
        }
        v = 0.0;
      }
      if (v > 1.0 + tol::entry_upper) throw DomainError("MarkovKernel: entry exceeds one");
    }
    const double s = m_.row(x).sum();
    if (std::abs(s - 1.0) > tol) {
      throw DomainError("MarkovKernel: row " + std::to_string(x) + " sums to " + fmt_double(s));
    }
  }
}

MarkovKernel MarkovKernel::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return MarkovKernel(Matrix::Identity(k, k));
}

ObsFunction MarkovKernel::apply(const ObsFunction& f) const {
  require_same_size(size(), f.size(), "MarkovKernel::apply");
  return ObsFunction(m_ * f.values());
}

Vector MarkovKernel::push(const Vector& mu) const {
  require_same_size(size(), static_cast<std::size_t>(mu.size()), "MarkovKernel::push");
  return (mu.transpose() * m_).transpose();
}

MarkovKernel MarkovKernel::certified(const Distribution& pi) const {
  if (!is_stationary(*this, pi)) throw DomainError("MarkovKernel::certified: pi is not stationary");
  MarkovKernel out = *this;
  out.stationary_ = pi;
  out.reversible_ = is_reversible(*this, pi);
  return out;
}

// Operations

double weighted_inner(const ObsFunction& f, const ObsFunction& h, const Distribution& pi) {
  require_same_size(f.size(), pi.size(), "weighted_inner");
  require_same_size(h.size(), pi.size(), "weighted_inner");
  return (pi.weights().array() * f.values().array() * h.values().array()).sum();
}

MarkovKernel adjoint(const MarkovKernel& p, const Distribution& pi) {
  require_same_size(p.size(), pi.size(), "adjoint");
  pi.require_positive("adjoint");
  if (!is_stationary(p, pi)) throw DomainError("adjoint: kernel is not pi-stationary");
  const auto n = static_cast<Eigen::Index>(p.size());
  const Vector& w = pi.weights();
  Matrix a(n, n);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index y = 0; y < n; ++y) a(x, y) = w[y] * p.matrix()(y, x) / w[x];
  }
  // Row sums equal (pi P)(x) / pi(x); renormalize the rounding error only.
  for (Eigen::Index x = 0; x < n; ++x) a.row(x) /= a.row(x).sum();
  return MarkovKernel(std::move(a));
}

MarkovKernel compose(const MarkovKernel& p, const MarkovKernel& m) {
  require_same_size(p.size(), m.size(), "compose");
  return MarkovKernel(p.matrix() * m.matrix());
}

MarkovKernel mixture(const std::vector<double>& weights, const std::vector<MarkovKernel>& kernels) {
  if (weights.empty() || weights.size() != kernels.size()) {
    throw DimensionError("mixture: weights and kernels must be nonempty and of equal length");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw DomainError("mixture: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > tol::stochastic) throw DomainError("mixture: weights sum to " + fmt_double(total));
  const std::size_t n = kernels.front().size();
  Matrix acc = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < kernels.size(); ++i) {
    require_same_size(n, kernels[i].size(), "mixture");
    acc += weights[i] * kernels[i].matrix();
  }
  return MarkovKernel(std::move(acc));
}

MarkovKernel stationary_projector(const Distribution& pi) {
  const auto n = static_cast<Eigen::Index>(pi.size());
  Matrix m = Vector::Ones(n) * pi.weights().transpose();
  return MarkovKernel(std::move(m));
}

bool is_stationary(const MarkovKernel& p, const Distribution& pi, double tol) {
  require_same_size(p.size(), pi.size(), "is_stationary");
  const Vector r = p.push(pi.weights()) - pi.weights();
  return r.cwiseAbs().maxCoeff() <= tol;
}

bool is_reversible(const MarkovKernel& p, const Distribution& pi, double tol) {
  require_same_size(p.size(), pi.size(), "is_reversible");
  const Matrix flow = pi.weights().asDiagonal() * p.matrix();
  return (flow - flow.transpose()).cwiseAbs().maxCoeff() <= tol;
}

MarkovKernel lazy(const MarkovKernel& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  return MarkovKernel(0.5 * (Matrix::Identity(n, n) + p.matrix()));
}

} // namespace grpavg
