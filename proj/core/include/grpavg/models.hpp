#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "grpavg/group.hpp"
#include "grpavg/state.hpp"

namespace grpavg {

// Gibbs targets and Metropolis-Hastings

struct GibbsSpec {
  ObsFunction hamiltonian;
  double beta = 1.0;
};

/// pi(x) proportional to exp(-beta H(x)), evaluated after subtracting
/// min beta H so the largest weight is one.
Distribution gibbs(const GibbsSpec& spec);
/// log Z with Z = sum_x exp(-beta H(x)).
double log_partition(const GibbsSpec& spec);

/// Off-diagonal q(x,y) min{1, pi(y) q(y,x) / (pi(x) q(x,y))}; the
/// diagonal completes each row.
MarkovKernel metropolis_hastings(const MarkovKernel& proposal, const Distribution& pi);

/// Nearest-neighbour walk on a path of `size` states, 1/2 to each side
/// and 1/2 holding at both ends.
MarkovKernel nearest_neighbour_proposal(std::size_t size);

/// -|x + delta| for x = -n..n, stored at x + n.
ObsFunction vshape_hamiltonian(int n, double delta = 0.0);

// Named chains

struct ModelParams {
  int n = 4;
  double beta = 1.0;
  double delta = 0.0;
  std::int64_t a = 2;
  std::optional<std::vector<double>> noise;  // cdg increments -1, 0, +1
  bool lazy = false;                          // srw-cycle
};

struct NamedModel {
  std::string name;
  MarkovKernel kernel;
  Distribution pi;
  StateSpace space;
};

/// vshape, vshape-perturbed, dhn, dhn-right-averaged, cdg, srw-cycle.
/// Each kernel is certified stationary for the returned law.
NamedModel named_model(const std::string& name, const ModelParams& params);
const std::vector<std::string>& model_names();

// Named groups

struct GroupParams {
  int n = 4;
  std::optional<int> j;   // block-reversal level; all levels when empty
  std::int64_t a = 2;     // mod-mult and power-map multiplier
  std::int64_t k = 1;     // power-map exponent
};

/// shift, flip, reflection, block-reversal, mod-mult, power-map. The
/// result is a generator list; use `close_generators` for the group.
/// flip acts on -n..n (size 2n + 1), block-reversal on 2^k = n states,
/// and every other group on n states.
std::vector<Perm> named_group(const std::string& name, const GroupParams& params);
const std::vector<std::string>& group_names();

/// sigma^(j)(i) = q 2^j + (2^j - 1 - r) for i = q 2^j + r on 2^k states.
Perm block_reversal(int k, int j);

/// Uniform measure on {sigma^(0), ..., sigma^(k)}^2 as atoms over the
/// list returned by named_group("block-reversal").
PairMeasure block_reversal_measure(int k);

// Extended-space oracle models

struct ExtendedModel {
  ProductIndex index;
  Distribution joint;
  std::size_t base_size() const { return index.base; }
  std::size_t aux_size() const { return index.aux; }
  std::size_t encode(std::size_t x, std::size_t a) const { return index.encode(x, a); }
  std::pair<std::size_t, std::size_t> decode(std::size_t i) const { return index.decode(i); }
};

struct Edge {
  std::size_t u;
  std::size_t v;
};

/// Swendsen-Wang on a q-state Potts graph with unit couplings. The base
/// coordinate is the spin configuration sum_i sigma_i q^i, the auxiliary
/// coordinate the bond set sum_e b_e 2^e.
struct SwendsenWangModel {
  ExtendedModel model;
  std::size_t sites = 0;
  int q = 2;
  std::vector<Edge> edges;
  MarkovKernel bond;             // (sigma, b) -> (sigma, b') with b' ~ pi~(. | sigma)
  MarkovKernel sw_oracle;        // exact spin-marginal SW transition
  FiniteGroup group;             // product of per-site S_q
  Distribution potts;            // Potts law pi(sigma) proportional to exp(-beta #disagreeing edges)
};

/// Requires q^m 2^|E| <= max_dense_states.
SwendsenWangModel swendsen_wang_model(const std::vector<Edge>& edges, int q, double beta);

/// max over (sigma, b) with pi~(sigma, b) > 0 of the sup-distance between
/// the spin marginal of row (sigma, b) of P_bond Q(G, pi~) and
/// sw_oracle(sigma, .).
double sw_marginal_gap(const SwendsenWangModel& sw);

/// Parallel tempering with particle states x in X^L and a permutation
/// tau of the temperatures, omega_i = betas[tau(i)]. Flat index
/// (sum_i x_i |X|^i) L! + rank(tau).
struct ParallelTemperingModel {
  ExtendedModel model;
  std::size_t levels = 0;
  std::vector<std::vector<std::size_t>> temperature_perms;  // rank -> tau
  FiniteGroup group;            // S_L permuting the particles
  MarkovKernel k1;              // orbit average of the first-particle move
  MarkovKernel k2;              // swap average over adjacent-aligned pairs
  MarkovKernel k;               // k1 k2
  MarkovKernel k_symmetric;     // (k1 + k2) / 2
  MarkovKernel direct;          // independently enumerated level move then swap move
};

/// Requires |X|^L L! <= max_dense_states.
ParallelTemperingModel parallel_tempering_model(const ObsFunction& hamiltonian, const std::vector<double>& betas,
                                                const MarkovKernel& proposal);

} // namespace grpavg
