#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "grpavg/state.hpp"

namespace grpavg {

/// Bijection of {0, ..., n-1}; `(*this)[x]` is the image g.x.
///
/// Composition follows function composition: (a * b)[x] = a[b[x]].
/// With U_g f(x) = f(g.x) this gives U_a U_b = U_{b * a}.
class Perm {
public:
  Perm() = default;
  explicit Perm(std::vector<std::size_t> map);

  static Perm identity(std::size_t n);
  /// Builds a permutation from disjoint cycles; points not listed are fixed.
  static Perm from_cycles(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles);

  std::size_t size() const { return map_.size(); }
  std::size_t operator[](std::size_t x) const { return map_[x]; }
  const std::vector<std::size_t>& map() const { return map_; }

  Perm inverse() const;
  bool is_identity() const;

  friend Perm operator*(const Perm& a, const Perm& b);
  friend bool operator==(const Perm& a, const Perm& b) { return a.map_ == b.map_; }
  friend bool operator<(const Perm& a, const Perm& b) { return a.map_ < b.map_; }

private:
  std::vector<std::size_t> map_;
};

struct PermHash {
  std::size_t operator()(const Perm& p) const noexcept;
};

inline constexpr std::size_t default_group_cap = 10000;

/// Finite permutation group stored by its explicit element list.
/// Element 0 is always the identity.
class FiniteGroup {
public:
  /// Validates closure, inverses and distinctness. Moves the identity to
  /// the front if necessary.
  explicit FiniteGroup(std::vector<Perm> elements);

  std::size_t order() const { return elements_.size(); }
  std::size_t degree() const { return elements_.front().size(); }
  const std::vector<Perm>& elements() const { return elements_; }
  const Perm& operator[](std::size_t i) const { return elements_[i]; }

  /// Index of p in the element list, or order() if absent.
  std::size_t index_of(const Perm& p) const;
  std::size_t inverse_index(std::size_t i) const { return inverse_[i]; }
  /// Index of elements()[i] * elements()[j].
  std::size_t product_index(std::size_t i, std::size_t j) const;

  /// Full composition table; O(|G|^2 n).
  std::vector<std::vector<std::size_t>> cayley_table() const;
  /// Re-checks the group axioms by scanning the composition table.
  bool verify_axioms() const;

private:
  std::vector<Perm> elements_;
  std::unordered_map<Perm, std::size_t, PermHash> index_;
  std::vector<std::size_t> inverse_;
};

/// Breadth-first closure of `gens` under composition and inversion.
/// Throws LimitError once more than `cap` elements are found.
FiniteGroup close_generators(const std::vector<Perm>& gens, std::size_t cap = default_group_cap);

/// Kernel U_g with U_g(x, y) = 1 iff y = g.x.
MarkovKernel perm_kernel(const Perm& g);

/// Finitely supported probability measure on pairs (g, h), stored as
/// indices into a permutation list.
class PairMeasure {
public:
  struct Atom {
    std::size_t left;
    std::size_t right;
    double weight;
  };

  /// `support_size` is the length of the permutation list the indices
  /// refer to.
  PairMeasure(std::vector<Atom> atoms, std::size_t support_size);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t support_size() const { return support_size_; }

private:
  std::vector<Atom> atoms_;
  std::size_t support_size_;
};

enum class PairKind { product, conjugation, twisted, left, right };

std::string to_string(PairKind kind);
PairKind pair_kind_from_string(const std::string& name);

/// The named pair measures over a group:
/// product (g, h) uniform on G x G, conjugation (g, g^-1), twisted (g, g),
/// left (g, e) and right (e, g), each uniform in g.
PairMeasure pair_measure(const FiniteGroup& group, PairKind kind);

/// Validated custom measure over the elements of `group`.
PairMeasure pair_measure(const FiniteGroup& group, std::vector<PairMeasure::Atom> atoms);

/// Whether (g, h) and (h^-1, g^-1) have the same law. Only meaningful when
/// every inverse is in `perms`; returns false otherwise.
bool is_measure_symmetric(std::span<const Perm> perms, const PairMeasure& nu, double tol = tol::exact);
bool is_measure_symmetric(const FiniteGroup& group, const PairMeasure& nu, double tol = tol::exact);

/// Whether both coordinate marginals of nu are uniform over the group.
bool has_uniform_marginals(const FiniteGroup& group, const PairMeasure& nu, double tol = tol::exact);

/// pi(g.x) = pi(x) for every listed g and every x.
bool is_pi_invariant(std::span<const Perm> perms, const Distribution& pi, double tol = tol::exact);
bool is_pi_invariant(const FiniteGroup& group, const Distribution& pi, double tol = tol::exact);

/// Orbits of the group generated by `perms`, each sorted, ordered by
/// smallest element.
std::vector<std::vector<std::size_t>> orbits(std::span<const Perm> perms);
std::vector<std::vector<std::size_t>> orbits(const FiniteGroup& group);

} // namespace grpavg
