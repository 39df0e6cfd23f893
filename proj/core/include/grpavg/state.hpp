#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grpavg/tolerance.hpp"

namespace grpavg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Finite state space {0, ..., n-1} with optional display labels.
class StateSpace {
public:
  explicit StateSpace(std::size_t n, std::vector<std::string> labels = {});

  /// States -h..h stored at indices 0..2h, labelled by their signed value.
  static StateSpace signed_range(int half_width);

  std::size_t size() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::string label(std::size_t x) const;

private:
  std::size_t n_;
  std::vector<std::string> labels_;
};

/// Probability vector over the states. Weights are nonnegative and sum
/// to one within `tol::distribution_sum`.
class Distribution {
public:
  explicit Distribution(Vector weights, double tol = tol::distribution_sum);

  static Distribution uniform(std::size_t n);
  /// Normalizes a nonnegative mass vector with positive total.
  static Distribution normalized(const Vector& mass);

  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  double operator[](std::size_t x) const { return w_[static_cast<Eigen::Index>(x)]; }
  const Vector& weights() const { return w_; }

  bool strictly_positive() const;
  /// Throws DomainError naming `op` when some state carries zero mass.
  void require_positive(std::string_view op) const;

private:
  Vector w_;
};

/// Real-valued function on the states.
class ObsFunction {
public:
  ObsFunction() = default;
  explicit ObsFunction(Vector values);
  ObsFunction(std::initializer_list<double> values);

  static ObsFunction constant(std::size_t n, double c);

  std::size_t size() const { return static_cast<std::size_t>(v_.size()); }
  double operator[](std::size_t x) const { return v_[static_cast<Eigen::Index>(x)]; }
  const Vector& values() const { return v_; }

private:
  Vector v_;
};

/// Dense row-stochastic transition matrix.
///
/// Construction validates the rows (sums within the given tolerance,
/// entries in [0, 1 + 1e-12]) and clips negative dust above -1e-14 to
/// zero. A kernel may carry a certified stationary distribution; the
/// certificate is only attached after the predicate has been checked.
class MarkovKernel {
public:
  explicit MarkovKernel(Matrix rows, double tol = tol::stochastic);

  static MarkovKernel identity(std::size_t n);

  std::size_t size() const { return static_cast<std::size_t>(m_.rows()); }
  double operator()(std::size_t x, std::size_t y) const {
    return m_(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
  }
  const Matrix& matrix() const { return m_; }

  /// (P f)(x) = sum_y P(x,y) f(y).
  ObsFunction apply(const ObsFunction& f) const;
  /// Row vector mu P.
  Vector push(const Vector& mu) const;

  /// Copy carrying `pi` as a verified stationary law. Throws DomainError
  /// when pi is not stationary for this kernel.
  MarkovKernel certified(const Distribution& pi) const;

  const std::optional<Distribution>& stationary() const { return stationary_; }
  bool stationary_verified() const { return stationary_.has_value(); }
  bool reversible_verified() const { return reversible_; }

private:
  Matrix m_;
  std::optional<Distribution> stationary_;
  bool reversible_ = false;
};

/// Flat indexing of a product space X x A as x * |A| + a.
struct ProductIndex {
  std::size_t base = 0;
  std::size_t aux = 0;

  std::size_t size() const { return base * aux; }
  std::size_t encode(std::size_t x, std::size_t a) const { return x * aux + a; }
  std::pair<std::size_t, std::size_t> decode(std::size_t i) const { return {i / aux, i % aux}; }
};

/// sum_x pi(x) f(x) h(x).
double weighted_inner(const ObsFunction& f, const ObsFunction& h, const Distribution& pi);

/// Time reversal P*(x,y) = pi(y) P(y,x) / pi(x). Requires pi strictly
/// positive and stationary for P.
MarkovKernel adjoint(const MarkovKernel& p, const Distribution& pi);

/// Matrix product P M.
MarkovKernel compose(const MarkovKernel& p, const MarkovKernel& m);

/// Convex combination sum_i w_i K_i.
MarkovKernel mixture(const std::vector<double>& weights, const std::vector<MarkovKernel>& kernels);

/// Rank-one kernel whose rows all equal pi.
MarkovKernel stationary_projector(const Distribution& pi);

bool is_stationary(const MarkovKernel& p, const Distribution& pi, double tol = tol::stochastic);
bool is_reversible(const MarkovKernel& p, const Distribution& pi, double tol = tol::stochastic);

/// (I + P) / 2.
MarkovKernel lazy(const MarkovKernel& p);

/// Throws DimensionError unless a == b.
void require_same_size(std::size_t a, std::size_t b, std::string_view op);

} // namespace grpavg
