#include "grpavg/group.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "grpavg/error.hpp"

namespace grpavg {

// Perm

Perm::Perm(std::vector<std::size_t> map) : map_(std::move(map)) {
  std::vector<bool> hit(map_.size(), false);
  for (std::size_t v : map_) {
    if (v >= map_.size() || hit[v]) throw DomainError("Perm: map is not a bijection");
    hit[v] = true;
  }
}

Perm Perm::identity(std::size_t n) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  return Perm(std::move(m));
}

Perm Perm::from_cycles(std::size_t n, const std::vector<std::vector<std::size_t>>& cycles) {
  std::vector<std::size_t> m(n);
  std::iota(m.begin(), m.end(), std::size_t{0});
  std::vector<bool> used(n, false);
  for (const auto& c : cycles) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= n || used[c[i]]) throw DomainError("Perm::from_cycles: cycles must be disjoint and in range");
      used[c[i]] = true;
      m[c[i]] = c[(i + 1) % c.size()];
    }
  }
  return Perm(std::move(m));
}

Perm Perm::inverse() const {
  std::vector<std::size_t> inv(map_.size());
  for (std::size_t x = 0; x < map_.size(); ++x) inv[map_[x]] = x;
  Perm out;
  out.map_ = std::move(inv);
  return out;
}

bool Perm::is_identity() const {
  for (std::size_t x = 0; x < map_.size(); ++x) {
    if (map_[x] != x) return false;
  }
  return true;
}

Perm operator*(const Perm& a, const Perm& b) {
  require_same_size(a.size(), b.size(), "Perm composition");
  Perm out;
  out.map_.resize(a.size());
  for (std::size_t x = 0; x < a.size(); ++x) out.map_[x] = a.map_[b.map_[x]];
  return out;
}

std::size_t PermHash::operator()(const Perm& p) const noexcept {
  // FNV-1a over the image list.
  std::size_t h = 1469598103934665603ull;
  for (std::size_t v : p.map()) {
    h ^= v + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h;
}

// FiniteGroup

FiniteGroup::FiniteGroup(std::vector<Perm> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw DomainError("FiniteGroup: empty element list");
  const std::size_t n = elements_.front().size();
  for (const Perm& p : elements_) require_same_size(n, p.size(), "FiniteGroup");
  auto id = std::find_if(elements_.begin(), elements_.end(), [](const Perm& p) { return p.is_identity(); });
  if (id == elements_.end()) throw DomainError("FiniteGroup: identity missing");
  std::iter_swap(elements_.begin(), id);

  index_.reserve(elements_.size() * 2);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (!index_.emplace(elements_[i], i).second) throw DomainError("FiniteGroup: duplicate element");
  }
  inverse_.resize(elements_.size());
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const std::size_t j = index_of(elements_[i].inverse());
    if (j == order()) throw DomainError("FiniteGroup: not closed under inverse");
    inverse_[i] = j;
  }
  // Full closure scan is O(|G|^2 n); larger lists are expected to come
  // from close_generators.
  if (elements_.size() <= 512) {
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      for (std::size_t j = 0; j < elements_.size(); ++j) {
        if (index_of(elements_[i] * elements_[j]) == order()) {
          throw DomainError("FiniteGroup: not closed under composition");
        }
      }
    }
  }
}

std::size_t FiniteGroup::index_of(const Perm& p) const {
  auto it = index_.find(p);
  return it == index_.end() ? order() : it->second;
}

std::size_t FiniteGroup::product_index(std::size_t i, std::size_t j) const {
  const std::size_t k = index_of(elements_[i] * elements_[j]);
  if (k == order()) throw DomainError("FiniteGroup::product_index: product outside group");
  return k;
}

std::vector<std::vector<std::size_t>> FiniteGroup::cayley_table() const {
  std::vector<std::vector<std::size_t>> t(order(), std::vector<std::size_t>(order()));
  for (std::size_t i = 0; i < order(); ++i) {
    for (std::size_t j = 0; j < order(); ++j) t[i][j] = index_of(elements_[i] * elements_[j]);
  }
  return t;
}

bool FiniteGroup::verify_axioms() const {
  if (!elements_.front().is_identity()) return false;
  const auto t = cayley_table();
  for (std::size_t i = 0; i < order(); ++i) {
    if (t[0][i] != i || t[i][0] != i) return false;
    if (t[i][inverse_[i]] != 0 || t[inverse_[i]][i] != 0) return false;
    for (std::size_t j = 0; j < order(); ++j) {
      if (t[i][j] == order()) return false;
    }
  }
  // Associativity is inherited from function composition; a spot check
  // over all triples is skipped for large groups.
  if (order() <= 64) {
    for (std::size_t a = 0; a < order(); ++a)
      for (std::size_t b = 0; b < order(); ++b)
        for (std::size_t c = 0; c < order(); ++c)
          if (t[t[a][b]][c] != t[a][t[b][c]]) return false;
  }
  return true;
}

FiniteGroup close_generators(const std::vector<Perm>& gens, std::size_t cap) {
  if (gens.empty()) throw DomainError("close_generators: no generators");
  const std::size_t n = gens.front().size();
  std::vector<Perm> moves;
  for (const Perm& g : gens) {
    require_same_size(n, g.size(), "close_generators");
    moves.push_back(g);
    moves.push_back(g.inverse());
  }
  std::vector<Perm> elements{Perm::identity(n)};
  std::unordered_map<Perm, std::size_t, PermHash> seen{{elements.front(), 0}};
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    const Perm cur = elements[frontier.front()];
    frontier.pop_front();
    for (const Perm& m : moves) {
      Perm next = m * cur;
      if (seen.count(next)) continue;
      if (elements.size() >= cap) {
        throw LimitError("close_generators: group exceeds cap of " + std::to_string(cap) + " elements");
      }
      seen.emplace(next, elements.size());
      frontier.push_back(elements.size());
      elements.push_back(std::move(next));
    }
  }
  return FiniteGroup(std::move(elements));
}

MarkovKernel perm_kernel(const Perm& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index x = 0; x < n; ++x) m(x, static_cast<Eigen::Index>(g[static_cast<std::size_t>(x)])) = 1.0;
  return MarkovKernel(std::move(m));
}

// PairMeasure

PairMeasure::PairMeasure(std::vector<Atom> atoms, std::size_t support_size)
    : atoms_(std::move(atoms)), support_size_(support_size) {
  if (atoms_.empty()) throw DomainError("PairMeasure: no atoms");
  long double total = 0.0L;
  for (const Atom& a : atoms_) {
    if (a.left >= support_size_ || a.right >= support_size_) {
      throw DomainError("PairMeasure: atom index out of range");
    }
    if (!(a.weight >= 0.0) || !std::isfinite(a.weight)) throw DomainError("PairMeasure: negative weight");
    total += a.weight;
  }
  if (std::abs(static_cast<double>(total) - 1.0) > tol::exact) throw DomainError("PairMeasure: weights do not sum to one");
}

std::string to_string(PairKind kind) {
  switch (kind) {
  case PairKind::product: return "product";
  case PairKind::conjugation: return "conjugation";
  case PairKind::twisted: return "twisted";
  case PairKind::left: return "left";
  case PairKind::right: return "right";
  }
  return "?";
}

PairKind pair_kind_from_string(const std::string& name) {
  for (PairKind k : {PairKind::product, PairKind::conjugation, PairKind::twisted, PairKind::left, PairKind::right}) {
    if (to_string(k) == name) return k;
  }
  throw DomainError("unknown pair measure kind '" + name + "'");
}

PairMeasure pair_measure(const FiniteGroup& group, PairKind kind) {
  const std::size_t m = group.order();
  std::vector<PairMeasure::Atom> atoms;
  if (kind == PairKind::product) {
    const double w = 1.0 / static_cast<double>(m * m);
    for (std::size_t g = 0; g < m; ++g)
      for (std::size_t h = 0; h < m; ++h) atoms.push_back({g, h, w});
    return PairMeasure(std::move(atoms), m);
  }
  const double w = 1.0 / static_cast<double>(m);
  for (std::size_t g = 0; g < m; ++g) {
    switch (kind) {
    case PairKind::conjugation: atoms.push_back({g, group.inverse_index(g), w}); break;
    case PairKind::twisted: atoms.push_back({g, g, w}); break;
    case PairKind::left: atoms.push_back({g, 0, w}); break;
    case PairKind::right: atoms.push_back({0, g, w}); break;
    case PairKind::product: break;
    }
  }
  return PairMeasure(std::move(atoms), m);
}

PairMeasure pair_measure(const FiniteGroup& group, std::vector<PairMeasure::Atom> atoms) {
  return PairMeasure(std::move(atoms), group.order());
}

namespace {

using PairKey = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

std::map<PairKey, double> aggregate(std::span<const Perm> perms, const PairMeasure& nu) {
  if (perms.size() != nu.support_size()) throw DimensionError("pair measure support differs from permutation list");
  std::map<PairKey, double> acc;
  for (const auto& a : nu.atoms()) acc[{perms[a.left].map(), perms[a.right].map()}] += a.weight;
  return acc;
}

} // namespace

bool is_measure_symmetric(std::span<const Perm> perms, const PairMeasure& nu, double tol) {
  const auto acc = aggregate(perms, nu);
  for (const auto& [key, w] : acc) {
    const PairKey mirror{Perm(key.second).inverse().map(), Perm(key.first).inverse().map()};
    auto it = acc.find(mirror);
    const double wm = it == acc.end() ? 0.0 : it->second;
    if (std::abs(w - wm) > tol) return false;
  }
  return true;
}

bool is_measure_symmetric(const FiniteGroup& group, const PairMeasure& nu, double tol) {
  return is_measure_symmetric(std::span<const Perm>(group.elements()), nu, tol);
}

bool has_uniform_marginals(const FiniteGroup& group, const PairMeasure& nu, double tol) {
  if (nu.support_size() != group.order()) return false;
  std::vector<double> left(group.order(), 0.0), right(group.order(), 0.0);
  for (const auto& a : nu.atoms()) {
    left[a.left] += a.weight;
    right[a.right] += a.weight;
  }
  const double u = 1.0 / static_cast<double>(group.order());
  for (std::size_t i = 0; i < group.order(); ++i) {
    if (std::abs(left[i] - u) > tol || std::abs(right[i] - u) > tol) return false;
  }
  return true;
}

bool is_pi_invariant(std::span<const Perm> perms, const Distribution& pi, double tol) {
  for (const Perm& g : perms) {
    require_same_size(g.size(), pi.size(), "is_pi_invariant");
    for (std::size_t x = 0; x < g.size(); ++x) {
      if (std::abs(pi[g[x]] - pi[x]) > tol) return false;
    }
  }
  return true;
}

bool is_pi_invariant(const FiniteGroup& group, const Distribution& pi, double tol) {
  return is_pi_invariant(std::span<const Perm>(group.elements()), pi, tol);
}

std::vector<std::vector<std::size_t>> orbits(std::span<const Perm> perms) {
  if (perms.empty()) throw DomainError("orbits: no permutations");
  const std::size_t n = perms.front().size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Perm& g : perms) {
    require_same_size(n, g.size(), "orbits");
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t a = find(x), b = find(g[x]);
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t x = 0; x < n; ++x) by_root[find(x)].push_back(x);
  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : by_root) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<std::size_t>> orbits(const FiniteGroup& group) {
  return orbits(std::span<const Perm>(group.elements()));
}

} // namespace grpavg
