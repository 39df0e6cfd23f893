#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "grpavg/group.hpp"
#include "grpavg/harness/experiments.hpp"
#include "grpavg/state.hpp"

namespace grpavg::harness::detail {

/// Portable uniform draws on top of the standard 64-bit Mersenne twister:
/// u = (next() >> 11) 2^-53.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  std::uint64_t next() { return eng_(); }
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

private:
  std::mt19937_64 eng_;
};

Perm random_perm(Rng& rng, std::size_t n);
Distribution random_distribution(Rng& rng, std::size_t n);
MarkovKernel random_row_stochastic(Rng& rng, std::size_t n, double zero_fraction = 0.0);
MarkovKernel random_doubly_stochastic(Rng& rng, std::size_t n);
/// Metropolis-Hastings kernel of a random proposal.
MarkovKernel random_reversible(Rng& rng, const Distribution& pi);
/// Product of two random reversible kernels: stationary, generally
/// non-reversible.
MarkovKernel random_stationary(Rng& rng, const Distribution& pi);
/// Stationary law by solving pi (P - I) = 0 with sum(pi) = 1.
Distribution solve_stationary(const MarkovKernel& p);

double max_abs(const Matrix& m);

void uniform_shift(const RunContext& ctx, ExperimentReport& r);
void asympvar_3state(const RunContext& ctx, ExperimentReport& r);
void frobenius_counterexamples(const RunContext& ctx, ExperimentReport& r);
void trace_2state(const RunContext& ctx, ExperimentReport& r);
void dhn_counterexample(const RunContext& ctx, ExperimentReport& r);
void vshape(const RunContext& ctx, ExperimentReport& r);
void vshape_perturbed(const RunContext& ctx, ExperimentReport& r);
void ncycle_blockrev(const RunContext& ctx, ExperimentReport& r);
void cdg_averaging(const RunContext& ctx, ExperimentReport& r);
void sw_check(const RunContext& ctx, ExperimentReport& r);
void pt_check(const RunContext& ctx, ExperimentReport& r);
void pmmh_check(const RunContext& ctx, ExperimentReport& r);
void random_batteries(const RunContext& ctx, ExperimentReport& r);

} // namespace grpavg::harness::detail
