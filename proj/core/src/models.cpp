#include "grpavg/models.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "grpavg/averaging.hpp"
#include "grpavg/error.hpp"

namespace grpavg {

namespace {

Eigen::Index ix(std::size_t i) { return static_cast<Eigen::Index>(i); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw DomainError(msg);
}

// Operands stay below 2^31 so products fit in 64 bits.
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t r = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1u) r = r * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return r;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, r = ((a % m) + m) % m;
  while (r != 0) {
    const std::int64_t q = g / r;
    std::tie(g, r) = std::make_pair(r, g - q * r);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  require(g == 1, "inverse_mod: argument is not invertible");
  return ((x % m) + m) % m;
}

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > max_dense_states * 64 / b) throw LimitError("extended model: state space too large");
    r *= b;
  }
  return r;
}

Perm shift_perm(std::size_t n, std::size_t by) {
  std::vector<std::size_t> m(n);
  for (std::size_t x = 0; x < n; ++x) m[x] = (x + by) % n;
  return Perm(std::move(m));
}

Perm reflection_perm(std::size_t n) {
  std::vector<std::size_t> m(n);
  for (std::size_t x = 0; x < n; ++x) m[x] = n - 1 - x;
  return Perm(std::move(m));
}

NamedModel vshape_model(const std::string& name, const ModelParams& p, double delta) {
  require(p.n >= 1, name + ": n must be at least 1");
  require(p.beta >= 0.0 && std::isfinite(p.beta), name + ": beta must be finite and nonnegative");
  const Distribution pi = gibbs({vshape_hamiltonian(p.n, delta), p.beta});
  const MarkovKernel k =
      metropolis_hastings(nearest_neighbour_proposal(static_cast<std::size_t>(2 * p.n + 1)), pi).certified(pi);
  return {name, k, pi, StateSpace::signed_range(p.n)};
}

NamedModel dhn_model(const std::string& name, const ModelParams& p, double weight_flip) {
  require(p.n >= 1, name + ": n must be at least 1");
  const auto size = static_cast<std::size_t>(2 * p.n);
  Matrix k = Matrix::Zero(ix(size), ix(size));
  for (std::size_t x = 0; x < size; ++x) {
    // P U_{g0}: x -> g0(x + 1) = 2n - 2 - x.
    k(ix(x), ix((x + 1) % size)) += 1.0 - weight_flip;
    k(ix(x), ix((2 * size - 2 - x) % size)) += weight_flip;
  }
  const Distribution pi = Distribution::uniform(size);
  return {name, MarkovKernel(std::move(k)).certified(pi), pi, StateSpace(size)};
}

NamedModel cdg_model(const ModelParams& p) {
  require(p.n >= 2, "cdg: n must be at least 2");
  require(std::gcd(p.a, static_cast<std::int64_t>(p.n)) == 1, "cdg: gcd(a, n) must be 1");
  std::vector<double> noise = p.noise.value_or(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  require(noise.size() == 3, "cdg: noise must give the masses of -1, 0, +1");
  for (double w : noise) require(w >= 0.0, "cdg: noise masses must be nonnegative");
  require(std::abs(noise[0] + noise[1] + noise[2] - 1.0) <= tol::distribution_sum, "cdg: noise must sum to one");
  const auto n = static_cast<std::size_t>(p.n);
  const auto a = static_cast<std::size_t>(((p.a % p.n) + p.n) % p.n);
  Matrix k = Matrix::Zero(ix(n), ix(n));
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t gx = a * x % n;
    k(ix(x), ix((gx + n - 1) % n)) += noise[0];
    k(ix(x), ix(gx)) += noise[1];
    k(ix(x), ix((gx + 1) % n)) += noise[2];
  }
  const Distribution pi = Distribution::uniform(n);
  return {"cdg", MarkovKernel(std::move(k)).certified(pi), pi, StateSpace(n)};
}

NamedModel srw_cycle_model(const ModelParams& p) {
  require(p.n >= 2, "srw-cycle: n must be at least 2");
  const auto n = static_cast<std::size_t>(p.n);
  Matrix k = Matrix::Zero(ix(n), ix(n));
  for (std::size_t x = 0; x < n; ++x) {
    k(ix(x), ix((x + 1) % n)) += 0.5;
    k(ix(x), ix((x + n - 1) % n)) += 0.5;
  }
  MarkovKernel kernel(std::move(k));
  if (p.lazy) kernel = lazy(kernel);
  const Distribution pi = Distribution::uniform(n);
  return {"srw-cycle", kernel.certified(pi), pi, StateSpace(n)};
}

} // namespace

// Gibbs and Metropolis-Hastings

Distribution gibbs(const GibbsSpec& spec) {
  const Vector& h = spec.hamiltonian.values();
  require(h.size() > 0, "gibbs: empty Hamiltonian");
  require(h.allFinite() && std::isfinite(spec.beta), "gibbs: non-finite energy or beta");
  const Vector e = -spec.beta * h;
  const Vector w = (e.array() - e.maxCoeff()).exp();
  return Distribution(w / w.sum());
}

double log_partition(const GibbsSpec& spec) {
  const Vector e = -spec.beta * spec.hamiltonian.values();
  const double top = e.maxCoeff();
  return top + std::log((e.array() - top).exp().sum());
}

MarkovKernel metropolis_hastings(const MarkovKernel& proposal, const Distribution& pi) {
  require_same_size(proposal.size(), pi.size(), "metropolis_hastings");
  pi.require_positive("metropolis_hastings");
  const std::size_t n = pi.size();
  Matrix k = Matrix::Zero(ix(n), ix(n));
  for (std::size_t x = 0; x < n; ++x) {
    double moved = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      if (y == x) continue;
      const double q = proposal(x, y);
      if (q == 0.0) continue;
      const double w = q * std::min(1.0, pi[y] * proposal(y, x) / (pi[x] * q));
      k(ix(x), ix(y)) = w;
      moved += w;
    }
    k(ix(x), ix(x)) = 1.0 - moved;
  }
  return MarkovKernel(std::move(k));
}

MarkovKernel nearest_neighbour_proposal(std::size_t size) {
  require(size >= 2, "nearest_neighbour_proposal: need at least 2 states");
  Matrix q = Matrix::Zero(ix(size), ix(size));
  for (std::size_t x = 0; x < size; ++x) {
    q(ix(x), ix(x == 0 ? 0 : x - 1)) += 0.5;
    q(ix(x), ix(x + 1 == size ? x : x + 1)) += 0.5;
  }
  return MarkovKernel(std::move(q));
}

ObsFunction vshape_hamiltonian(int n, double delta) {
  require(n >= 0, "vshape_hamiltonian: n must be nonnegative");
  Vector h(2 * n + 1);
  for (int x = -n; x <= n; ++x) h[x + n] = -std::abs(x + delta);
  return ObsFunction(std::move(h));
}

// Named chains

const std::vector<std::string>& model_names() {
  static const std::vector<std::string> names{"vshape", "vshape-perturbed", "dhn", "dhn-right-averaged", "cdg",
                                              "srw-cycle"};
  return names;
}

NamedModel named_model(const std::string& name, const ModelParams& p) {
  if (name == "vshape") return vshape_model(name, p, 0.0);
  if (name == "vshape-perturbed") {
    require(p.delta > 0.0 && p.delta < 0.5, "vshape-perturbed: delta must lie in (0, 1/2)");
    return vshape_model(name, p, p.delta);
  }
  if (name == "dhn") return dhn_model(name, p, 1.0 / p.n);
  if (name == "dhn-right-averaged") return dhn_model(name, p, 0.5);
  if (name == "cdg") return cdg_model(p);
  if (name == "srw-cycle") return srw_cycle_model(p);
  throw DomainError("unknown model '" + name + "'");
}

// Named groups

const std::vector<std::string>& group_names() {
  static const std::vector<std::string> names{"shift", "flip", "reflection", "block-reversal", "mod-mult",
                                              "power-map"};
  return names;
}

Perm block_reversal(int k, int j) {
  require(k >= 0 && k < 31, "block_reversal: k out of range");
  require(j >= 0 && j <= k, "block_reversal: j must lie in 0..k");
  const std::size_t n = std::size_t{1} << k;
  const std::size_t len = std::size_t{1} << j;
  std::vector<std::size_t> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = (i / len) * len + (len - 1 - i % len);
  Perm s(std::move(m));
  require((s * s).is_identity(), "block_reversal: not an involution");
  return s;
}

PairMeasure block_reversal_measure(int k) {
  const auto m = static_cast<std::size_t>(k + 1);
  std::vector<PairMeasure::Atom> atoms;
  const double w = 1.0 / static_cast<double>(m * m);
  for (std::size_t g = 0; g < m; ++g)
    for (std::size_t h = 0; h < m; ++h) atoms.push_back({g, h, w});
  return PairMeasure(std::move(atoms), m);
}

std::vector<Perm> named_group(const std::string& name, const GroupParams& p) {
  if (name == "shift") {
    require(p.n >= 1, "shift: n must be at least 1");
    return {shift_perm(static_cast<std::size_t>(p.n), 1)};
  }
  if (name == "flip") {
    require(p.n >= 0, "flip: n must be nonnegative");
    return {reflection_perm(static_cast<std::size_t>(2 * p.n + 1))};
  }
  if (name == "reflection") {
    require(p.n >= 1, "reflection: n must be at least 1");
    return {reflection_perm(static_cast<std::size_t>(p.n))};
  }
  if (name == "block-reversal") {
    require(p.n >= 1 && std::has_single_bit(static_cast<unsigned>(p.n)), "block-reversal: n must be a power of 2");
    const int k = std::countr_zero(static_cast<unsigned>(p.n));
    if (p.j) return {block_reversal(k, *p.j)};
    std::vector<Perm> out;
    for (int j = 0; j <= k; ++j) out.push_back(block_reversal(k, j));
    return out;
  }
  if (name == "mod-mult") {
    require(p.n >= 2, "mod-mult: n must be at least 2");
    require(std::gcd(p.a, static_cast<std::int64_t>(p.n)) == 1, "mod-mult: gcd(a, n) must be 1");
    const auto n = static_cast<std::size_t>(p.n);
    const auto a = static_cast<std::size_t>(((p.a % p.n) + p.n) % p.n);
    std::vector<std::size_t> m(n);
    for (std::size_t x = 0; x < n; ++x) m[x] = a * x % n;
    return {Perm(std::move(m))};
  }
  if (name == "power-map") {
    require(is_prime(p.n), "power-map: n must be prime");
    require(p.n < (std::int64_t{1} << 31), "power-map: n too large");
    const std::int64_t n = p.n;
    const std::int64_t a = ((p.a % n) + n) % n;
    require(a != 0, "power-map: a must be nonzero mod n");
    require(p.k >= 1 && std::gcd(p.k, n - 1) == 1, "power-map: gcd(k, n - 1) must be 1");
    const std::int64_t m_exp = n == 2 ? 1 : inverse_mod(p.k, n - 1);
    const std::int64_t a_inv = inverse_mod(a, n);
    std::vector<std::size_t> f(static_cast<std::size_t>(n)), finv(static_cast<std::size_t>(n));
    const auto un = static_cast<std::uint64_t>(n);
    for (std::int64_t x = 0; x < n; ++x) {
      const auto ux = static_cast<std::uint64_t>(x);
      f[static_cast<std::size_t>(x)] =
          static_cast<std::size_t>(static_cast<std::uint64_t>(a) * pow_mod(ux, static_cast<std::uint64_t>(p.k), un) % un);
      finv[static_cast<std::size_t>(x)] = static_cast<std::size_t>(
          pow_mod(static_cast<std::uint64_t>(a_inv) * ux % un, static_cast<std::uint64_t>(m_exp), un));
    }
    Perm fp(std::move(f)), fi(std::move(finv));
    require((fp * fi).is_identity(), "power-map: inverse formula failed");
    return {fp, fi};
  }
  throw DomainError("unknown group '" + name + "'");
}

// Swendsen-Wang

namespace {

std::vector<int> decode_spins(std::size_t code, std::size_t sites, int q) {
  std::vector<int> s(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    s[i] = static_cast<int>(code % static_cast<std::size_t>(q));
    code /= static_cast<std::size_t>(q);
  }
  return s;
}

std::size_t encode_spins(const std::vector<int>& s, int q) {
  std::size_t code = 0;
  for (std::size_t i = s.size(); i-- > 0;) code = code * static_cast<std::size_t>(q) + static_cast<std::size_t>(s[i]);
  return code;
}

std::size_t count_components(std::size_t sites, const std::vector<Edge>& edges, std::size_t bonds) {
  std::vector<std::size_t> parent(sites);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t comps = sites;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!(bonds >> e & 1u)) continue;
    const std::size_t a = find(edges[e].u), b = find(edges[e].v);
    if (a != b) {
      parent[a] = b;
      --comps;
    }
  }
  return comps;
}

// P(b' | sigma) for unit couplings.
double bond_probability(const std::vector<int>& s, const std::vector<Edge>& edges, std::size_t bonds, double p) {
  double w = 1.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const bool on = bonds >> e & 1u;
    const bool eq = s[edges[e].u] == s[edges[e].v];
    w *= eq ? (on ? p : 1.0 - p) : (on ? 0.0 : 1.0);
  }
  return w;
}

bool consistent(const std::vector<int>& s, const std::vector<Edge>& edges, std::size_t bonds) {
  for (std::size_t e = 0; e < edges.size(); ++e)
    if ((bonds >> e & 1u) && s[edges[e].u] != s[edges[e].v]) return false;
  return true;
}

} // namespace

SwendsenWangModel swendsen_wang_model(const std::vector<Edge>& edges, int q, double beta) {
  require(q >= 2, "swendsen_wang_model: q must be at least 2");
  require(beta >= 0.0 && std::isfinite(beta), "swendsen_wang_model: beta must be finite and nonnegative");
  require(!edges.empty(), "swendsen_wang_model: need at least one edge");
  require(edges.size() < 20, "swendsen_wang_model: too many edges");
  std::size_t sites = 0;
  for (const Edge& e : edges) {
    require(e.u != e.v, "swendsen_wang_model: self-loops are not allowed");
    sites = std::max({sites, e.u + 1, e.v + 1});
  }
  const std::size_t spins = ipow(static_cast<std::size_t>(q), sites);
  const std::size_t bond_sets = std::size_t{1} << edges.size();
  if (spins * bond_sets > max_dense_states) throw LimitError("swendsen_wang_model: extended space too large");
  const ProductIndex idx{spins, bond_sets};
  const double p = 1.0 - std::exp(-beta);

  Vector joint(ix(idx.size()));
  Matrix bond = Matrix::Zero(ix(idx.size()), ix(idx.size()));
  Vector potts(ix(spins));
  Matrix oracle = Matrix::Zero(ix(spins), ix(spins));
  for (std::size_t sc = 0; sc < spins; ++sc) {
    const std::vector<int> s = decode_spins(sc, sites, q);
    std::vector<double> cond(bond_sets);
    for (std::size_t b = 0; b < bond_sets; ++b) cond[b] = bond_probability(s, edges, b, p);
    for (std::size_t b = 0; b < bond_sets; ++b) {
      double w = 1.0;
      for (std::size_t e = 0; e < edges.size(); ++e) {
        const bool eq = s[edges[e].u] == s[edges[e].v];
        w *= (b >> e & 1u) ? (eq ? p : 0.0) : 1.0 - p;
      }
      joint[ix(idx.encode(sc, b))] = w;
      for (std::size_t b2 = 0; b2 < bond_sets; ++b2) bond(ix(idx.encode(sc, b)), ix(idx.encode(sc, b2))) = cond[b2];
    }
    double disagree = 0.0;
    for (const Edge& e : edges) disagree += s[e.u] != s[e.v] ? 1.0 : 0.0;
    potts[ix(sc)] = std::exp(-beta * disagree);
    for (std::size_t b = 0; b < bond_sets; ++b) {
      if (cond[b] == 0.0) continue;
      const double share =
          cond[b] / std::pow(static_cast<double>(q), static_cast<double>(count_components(sites, edges, b)));
      for (std::size_t sc2 = 0; sc2 < spins; ++sc2) {
        if (consistent(decode_spins(sc2, sites, q), edges, b)) oracle(ix(sc), ix(sc2)) += share;
      }
    }
  }

  std::vector<Perm> gens;
  auto site_perm = [&](std::size_t site, const std::vector<int>& value_map) {
    std::vector<std::size_t> m(idx.size());
    for (std::size_t sc = 0; sc < spins; ++sc) {
      std::vector<int> s = decode_spins(sc, sites, q);
      s[site] = value_map[static_cast<std::size_t>(s[site])];
      const std::size_t to = encode_spins(s, q);
      for (std::size_t b = 0; b < bond_sets; ++b) m[idx.encode(sc, b)] = idx.encode(to, b);
    }
    return Perm(std::move(m));
  };
  for (std::size_t i = 0; i < sites; ++i) {
    std::vector<int> swap(static_cast<std::size_t>(q)), cycle(static_cast<std::size_t>(q));
    std::iota(swap.begin(), swap.end(), 0);
    std::swap(swap[0], swap[1]);
    for (int v = 0; v < q; ++v) cycle[static_cast<std::size_t>(v)] = (v + 1) % q;
    gens.push_back(site_perm(i, swap));
    if (q > 2) gens.push_back(site_perm(i, cycle));
  }

  return SwendsenWangModel{ExtendedModel{idx, Distribution::normalized(joint)},
                           sites,
                           q,
                           edges,
                           MarkovKernel(std::move(bond)),
                           MarkovKernel(std::move(oracle)),
                           close_generators(gens),
                           Distribution::normalized(potts)};
}

double sw_marginal_gap(const SwendsenWangModel& sw) {
  const Distribution& joint = sw.model.joint;
  const MarkovKernel q = state_dependent_Q(sw.group, joint, ZeroMass::uniform_null_orbit);
  const Matrix m = sw.bond.matrix() * q.matrix();
  const ProductIndex& idx = sw.model.index;
  double worst = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (joint[i] <= 0.0) continue;
    const std::size_t sc = idx.decode(i).first;
    for (std::size_t sc2 = 0; sc2 < idx.base; ++sc2) {
      double marg = 0.0;
      for (std::size_t b = 0; b < idx.aux; ++b) marg += m(ix(i), ix(idx.encode(sc2, b)));
      worst = std::max(worst, std::abs(marg - sw.sw_oracle(sc, sc2)));
    }
  }
  return worst;
}

// Parallel tempering

ParallelTemperingModel parallel_tempering_model(const ObsFunction& hamiltonian, const std::vector<double>& betas,
                                                const MarkovKernel& proposal) {
  const std::size_t s = hamiltonian.size();
  const std::size_t levels = betas.size();
  require(levels >= 1, "parallel_tempering_model: need at least one temperature");
  require(levels <= 6, "parallel_tempering_model: too many temperatures");
  require_same_size(proposal.size(), s, "parallel_tempering_model");
  for (double b : betas) require(b >= 0.0 && std::isfinite(b), "parallel_tempering_model: invalid beta");

  std::vector<std::vector<std::size_t>> taus;
  std::vector<std::size_t> tau(levels);
  std::iota(tau.begin(), tau.end(), std::size_t{0});
  do taus.push_back(tau);
  while (std::next_permutation(tau.begin(), tau.end()));
  std::map<std::vector<std::size_t>, std::size_t> rank;
  for (std::size_t r = 0; r < taus.size(); ++r) rank[taus[r]] = r;

  const std::size_t xs = ipow(s, levels);
  if (xs * taus.size() > max_dense_states) throw LimitError("parallel_tempering_model: extended space too large");
  const ProductIndex idx{xs, taus.size()};
  const auto N = ix(idx.size());
  auto decode_x = [&](std::size_t code) {
    std::vector<std::size_t> x(levels);
    for (std::size_t i = 0; i < levels; ++i) {
      x[i] = code % s;
      code /= s;
    }
    return x;
  };
  auto encode_x = [&](const std::vector<std::size_t>& x) {
    std::size_t code = 0;
    for (std::size_t i = levels; i-- > 0;) code = code * s + x[i];
    return code;
  };
  const Vector& h = hamiltonian.values();

  Vector energy(N);
  for (std::size_t xc = 0; xc < xs; ++xc) {
    const auto x = decode_x(xc);
    for (std::size_t r = 0; r < taus.size(); ++r) {
      double e = 0.0;
      for (std::size_t i = 0; i < levels; ++i) e += betas[taus[r][i]] * h[ix(x[i])];
      energy[ix(idx.encode(xc, r))] = -e;
    }
  }
  const Vector mass = (energy.array() - energy.maxCoeff()).exp();
  const Distribution joint(mass / mass.sum());

  std::vector<MarkovKernel> mh;
  for (double b : betas) mh.push_back(metropolis_hastings(proposal, gibbs({hamiltonian, b})));

  // Moves of a single particle i at its own inverse temperature.
  auto particle_move = [&](std::size_t i) {
    Matrix m = Matrix::Zero(N, N);
    for (std::size_t xc = 0; xc < xs; ++xc) {
      const auto x = decode_x(xc);
      for (std::size_t r = 0; r < taus.size(); ++r) {
        const MarkovKernel& k = mh[taus[r][i]];
        auto y = x;
        for (std::size_t v = 0; v < s; ++v) {
          y[i] = v;
          m(ix(idx.encode(xc, r)), ix(idx.encode(encode_x(y), r))) += k(x[i], v);
        }
      }
    }
    return m;
  };
  // Swap of the states of particles j and j + 1 with the tempering acceptance.
  auto swap_move = [&](std::size_t j) {
    Matrix m = Matrix::Zero(N, N);
    for (std::size_t xc = 0; xc < xs; ++xc) {
      const auto x = decode_x(xc);
      for (std::size_t r = 0; r < taus.size(); ++r) {
        const double w0 = betas[taus[r][j]], w1 = betas[taus[r][j + 1]];
        const double alpha = std::min(1.0, std::exp(-(w1 - w0) * (h[ix(x[j])] - h[ix(x[j + 1])])));
        auto y = x;
        std::swap(y[j], y[j + 1]);
        const auto from = ix(idx.encode(xc, r));
        m(from, ix(idx.encode(encode_x(y), r))) += alpha;
        m(from, from) += 1.0 - alpha;
      }
    }
    return m;
  };

  // S_L acting by (g z)_k = z_{g^-1(k)}.
  std::vector<Perm> flat;
  for (const auto& g : taus) {
    std::vector<std::size_t> ginv(levels);
    for (std::size_t k = 0; k < levels; ++k) ginv[g[k]] = k;
    std::vector<std::size_t> map(idx.size());
    for (std::size_t xc = 0; xc < xs; ++xc) {
      const auto x = decode_x(xc);
      std::vector<std::size_t> y(levels);
      for (std::size_t k = 0; k < levels; ++k) y[k] = x[ginv[k]];
      for (std::size_t r = 0; r < taus.size(); ++r) {
        std::vector<std::size_t> t(levels);
        for (std::size_t k = 0; k < levels; ++k) t[k] = taus[r][ginv[k]];
        map[idx.encode(xc, r)] = idx.encode(encode_x(y), rank.at(t));
      }
    }
    flat.emplace_back(std::move(map));
  }
  FiniteGroup group(flat);

  const MarkovKernel p1(particle_move(0));
  const MarkovKernel k1 = special_average(p1, group, AverageKind::orbit, joint);
  MarkovKernel k2 = MarkovKernel::identity(idx.size());
  Matrix d2 = Matrix::Identity(N, N);
  if (levels >= 2) {
    const MarkovKernel p2(swap_move(0));
    double fact = 1.0;
    for (std::size_t i = 2; i < levels; ++i) fact *= static_cast<double>(i);
    std::vector<PairMeasure::Atom> atoms;
    for (std::size_t r = 0; r < taus.size(); ++r) {
      const auto& g = taus[r];
      std::vector<std::size_t> ginv(levels);
      for (std::size_t k = 0; k < levels; ++k) ginv[g[k]] = k;
      if (ginv[1] != ginv[0] + 1) continue;
      const std::size_t gi = group.index_of(flat[r]);
      atoms.push_back({gi, group.inverse_index(gi), 1.0 / fact});
    }
    k2 = double_average(p2, group.elements(), pair_measure(group, std::move(atoms)));
    d2 = Matrix::Zero(N, N);
    for (std::size_t j = 0; j + 1 < levels; ++j) d2 += swap_move(j) / static_cast<double>(levels - 1);
  }
  Matrix d1 = Matrix::Zero(N, N);
  for (std::size_t i = 0; i < levels; ++i) d1 += particle_move(i) / static_cast<double>(levels);

  MarkovKernel k = compose(k1, k2);
  MarkovKernel k_sym = mixture({0.5, 0.5}, {k1, k2});
  return ParallelTemperingModel{ExtendedModel{idx, joint},
                                levels,
                                taus,
                                std::move(group),
                                k1,
                                k2,
                                std::move(k),
                                std::move(k_sym),
                                MarkovKernel(d1 * d2)};
}

} // namespace grpavg
