#include "grpavg/harness/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "catalog.hpp"
#include "grpavg/averaging.hpp"
#include "grpavg/divergence.hpp"
#include "grpavg/dynamics.hpp"
#include "grpavg/harness/targets.hpp"
#include "grpavg/models.hpp"
#include "grpavg/spectral.hpp"

namespace grpavg::harness {

using nlohmann::json;

namespace {

const json& param(const json& params, const std::string& key) {
  if (!params.contains(key)) throw ConfigError("missing parameter '" + key + "'");
  return params.at(key);
}

int to_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("parameter '" + key + "' must be an integer");
  return v.get<int>();
}

double to_double(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("parameter '" + key + "' must be a number");
  return v.get<double>();
}

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

json merged_params(const ExperimentInfo& info, const json& overrides) {
  if (!overrides.is_object()) throw ConfigError("parameter overrides must be an object");
  json out = info.defaults;
  for (const auto& [k, v] : overrides.items()) {
    if (!info.defaults.contains(k)) throw ConfigError("unknown parameter '" + k + "' for experiment '" + info.name + "'");
    const json& d = info.defaults.at(k);
    const bool numeric_ok = v.is_number() && d.is_number_float();
    if (v.type() != d.type() && !numeric_ok && !(v.is_number_integer() && d.is_number_integer()))
      throw ConfigError("parameter '" + k + "' has the wrong type for experiment '" + info.name + "'");
    out[k] = v;
  }
  return out;
}

std::vector<ExperimentInfo> build_registry() {
  using namespace detail;
  return {
      {"uniform-shift", "averages over the shift group collapse to Pi under uniform pi",
       {{"sizes", {3, 4, 5, 6, 7, 8, 9, 10, 11, 12}}, {"instances", 100}, {"eps", 1e-9}}, uniform_shift},
      {"asympvar-3state", "asymptotic variances of a 3-state reversible chain and its averages", json::object(),
       asympvar_3state},
      {"frobenius-counterexamples", "the Frobenius Pythagorean identity fails under state-dependent averaging",
       json::object(), frobenius_counterexamples},
      {"trace-2state", "left and right averages can increase the trace", {{"a", 0.3}}, trace_2state},
      {"dhn-counterexample", "right averaging slows the lifted non-reversible walk",
       {{"gamma_ns", {4, 8, 16}},
        {"mixing_ns", {8, 16, 32, 64}},
        {"eps", 0.125},
        {"t_max", 1000000},
        {"curve_n", 8},
        {"curve_t", 64}},
       dhn_counterexample},
      {"vshape", "double averaging turns torpid Metropolis mixing on the V-shaped landscape rapid",
       {{"ns", {2, 3, 4, 5, 6, 7, 8}},
        {"betas", {0.5, 1.0, 2.0}},
        {"eps", 0.25},
        {"t_max", 1000000000},
        {"ratio_beta", 2.0},
        {"curve_n", 4},
        {"curve_t", 200}},
       vshape},
      {"vshape-perturbed", "state-dependent averaging on the shifted V-shaped landscape",
       {{"ns", {2, 3, 4, 5, 6, 7, 8}}, {"betas", {0.5, 1.0, 2.0}}, {"eps", 0.25}, {"delta", 0.3}, {"t_max", 1000000000}},
       vshape_perturbed},
      {"ncycle-blockrev", "block-reversal averaging of the simple random walk on the 2^k-cycle",
       {{"ks", {2, 3, 4, 5, 6}}, {"eps", 0.25}, {"srw_eps", 0.125}, {"t_max", 10000000}}, ncycle_blockrev},
      {"cdg-averaging", "averaging a multiply-and-perturb walk over the generated multiplicative group",
       {{"ns", {5, 7, 9, 11, 13, 15}}, {"a", 2}, {"power_n", 7}, {"power_k", 5}}, cdg_averaging},
      {"sw-check", "Swendsen-Wang as a bond move followed by state-dependent averaging",
       {{"beta", 0.8}, {"beta_q3", 0.6}}, sw_check},
      {"pt-check", "parallel tempering as level moves and temperature-swap averages",
       {{"hamiltonian", {0.0, 1.0, 0.5}}, {"betas", {0.5, 1.0}}, {"betas3", {0.25, 0.5, 1.0}}}, pt_check},
      {"pmmh-check", "pseudo-marginal chain with a random group element as auxiliary variable",
       {{"n", 6}, {"kl_trials", 200}}, pmmh_check},
      {"random-batteries", "randomized property batteries over groups, targets and kernels",
       {{"instances", 500}, {"max_n", 10}, {"eps_exponents", 10}, {"t_max", 100000}, {"mixing_every", 1}},
       random_batteries},
  };
}

// Custom model configs

struct Chain {
  MarkovKernel kernel;
  Distribution pi;
};

Chain build_chain(const ExperimentConfig& c) {
  if (const auto* named = std::get_if<NamedModelSpec>(&*c.model)) {
    NamedModel m = named_model(named->name, named->params);
    return {std::move(m.kernel), std::move(m.pi)};
  }
  const auto& inl = std::get<InlineModel>(*c.model);
  MarkovKernel k(inl.matrix);
  if (inl.pi) {
    const Vector w = Eigen::Map<const Vector>(inl.pi->data(), static_cast<Eigen::Index>(inl.pi->size()));
    return {std::move(k), Distribution(w)};
  }
  Distribution pi = detail::solve_stationary(k);
  return {std::move(k), std::move(pi)};
}

FiniteGroup build_group(const ExperimentConfig& c) {
  if (const auto* named = std::get_if<NamedGroupSpec>(&*c.group))
    return close_generators(named_group(named->name, named->params));
  std::vector<Perm> gens;
  for (const auto& p : std::get<InlineGroup>(*c.group).perms) gens.emplace_back(p);
  return close_generators(gens);
}

double tol_of(const ExperimentConfig& c, const std::string& key, double fallback) {
  const auto it = c.tolerances.find(key);
  return it == c.tolerances.end() ? fallback : it->second;
}

void run_diagnostics(const ExperimentConfig& c, ExperimentReport& r) {
  const Chain ch = build_chain(c);
  const MarkovKernel& p = ch.kernel;
  const Distribution& pi = ch.pi;
  std::optional<FiniteGroup> g;
  if (c.group) g = build_group(c);
  const double stoch = tol_of(c, "stochastic", tol::stochastic);
  const double derived = tol_of(c, "derived", tol::derived);
  const double exact = tol_of(c, "exact", tol::exact);
  const double cluster = tol_of(c, "cluster", tol::cluster);
  r.metric("states", static_cast<double>(p.size()));
  if (g) r.metric("group_order", static_cast<double>(g->order()));
  const bool invariant = g && is_pi_invariant(*g, pi, exact);

  // Averaged kernel under nu (default: independent left and right).
  auto averaged = [&]() -> MarkovKernel {
    if (!g) throw DomainError("diagnostic needs a group");
    if (!invariant) return sd_average(p, *g, pi, Side::both);
    if (c.nu && !c.nu->kind) return special_average(p, *g, pair_measure(*g, c.nu->atoms), pi);
    return special_average(p, *g, c.nu && c.nu->kind ? *c.nu->kind : AverageKind::independent, pi);
  };

  for (const std::string& d : c.diagnostics) {
    if (d == "stationarity") {
      const double defect = detail::max_abs(p.push(pi.weights()) - pi.weights());
      r.metric("stationarity_defect", defect);
      r.metric("reversible", is_reversible(p, pi, stoch) ? 1.0 : 0.0);
      r.check_le("pi P = pi", "", defect, 0.0, stoch);
    } else if (d == "spectral") {
      const SpectralReport s = spectral_report(p, pi, cluster);
      r.metric("lambda", s.lambda);
      r.metric("gamma", s.gamma);
      r.metric("lambda2", s.lambda2);
      r.metric("gamma2", s.gamma2);
    } else if (d == "average") {
      const MarkovKernel avg = averaged();
      const double ga = spectral_report(avg, pi, cluster).gamma;
      const double gp = spectral_report(p, pi, cluster).gamma;
      r.metric("gamma_average", ga);
      r.metric("lambda_average", spectral_report(avg, pi, cluster).lambda);
      r.check_ge("gamma(average) >= gamma(P)", "", ga, gp, derived);
      r.check_le("average stationary", "", detail::max_abs(avg.push(pi.weights()) - pi.weights()), 0.0, stoch);
    } else if (d == "cheeger") {
      const CheegerResult cr = cheeger(p, pi);
      r.metric("cheeger", cr.phi);
      if (g) r.metric("cheeger_average", cheeger(averaged(), pi).phi);
    } else if (d == "mixing") {
      std::uint64_t longest = 0;
      for (double eps : c.mixing.eps) {
        const auto t = mixing_time(p, pi, c.mixing.norm, eps, c.mixing.t_max);
        r.metric("tmix eps=" + format_number(eps), t ? static_cast<double>(*t) : INFINITY);
        if (t) longest = std::max(longest, *t);
        if (g) {
          const auto ta = mixing_time(averaged(), pi, c.mixing.norm, eps, c.mixing.t_max);
          r.metric("tmix_average eps=" + format_number(eps), ta ? static_cast<double>(*ta) : INFINITY);
          if (ta) longest = std::max(longest, *ta);
        }
      }
      const std::uint64_t horizon = std::min<std::uint64_t>(std::max<std::uint64_t>(longest, 1), 1000);
      r.curves.push_back({"P", to_string(c.mixing.norm), mixing_curve(p, pi, c.mixing.norm, {}, horizon).distances});
      if (g)
        r.curves.push_back(
            {"average", to_string(c.mixing.norm), mixing_curve(averaged(), pi, c.mixing.norm, {}, horizon).distances});
    } else if (d == "isotropy") {
      if (!g) throw DomainError("isotropy needs a group");
      if (!invariant) throw DomainError("isotropy needs a G-invariant pi");
      r.metric("distance_to_isotropy", distance_to_isotropy(p, *g, pi));
    } else if (d == "invariance") {
      if (!g) throw DomainError("invariance needs a group");
      const InvarianceFlags f = invariance_class(p, *g, pi, stoch);
      r.metric("pi_invariant", invariant ? 1.0 : 0.0);
      r.metric("in_LGGinv", f.in_LGGinv);
      r.metric("in_LGG", f.in_LGG);
      r.metric("in_LI", f.in_LI);
      r.metric("in_RI", f.in_RI);
      if (f.sd_left_fixed) r.metric("sd_left_fixed", *f.sd_left_fixed);
      if (f.sd_right_fixed) r.metric("sd_right_fixed", *f.sd_right_fixed);
    }
  }
}

} // namespace

int RunContext::get_int(const std::string& key) const { return to_int(param(params, key), key); }

double RunContext::get_double(const std::string& key) const { return to_double(param(params, key), key); }

bool RunContext::get_bool(const std::string& key) const {
  const json& v = param(params, key);
  if (!v.is_boolean()) throw ConfigError("parameter '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<int> RunContext::get_ints(const std::string& key) const {
  const json& v = param(params, key);
  if (!v.is_array() || v.empty()) throw ConfigError("parameter '" + key + "' must be a non-empty array");
  std::vector<int> out;
  for (const json& x : v) out.push_back(to_int(x, key));
  return out;
}

std::vector<double> RunContext::get_doubles(const std::string& key) const {
  const json& v = param(params, key);
  if (!v.is_array() || v.empty()) throw ConfigError("parameter '" + key + "' must be a non-empty array");
  std::vector<double> out;
  for (const json& x : v) out.push_back(to_double(x, key));
  return out;
}

double RunContext::tolerance(const std::string& key, double fallback) const {
  const auto it = tolerances.find(key);
  return it == tolerances.end() ? fallback : it->second;
}

const std::vector<ExperimentInfo>& registry() {
  static const std::vector<ExperimentInfo> reg = build_registry();
  return reg;
}

const ExperimentInfo* find_experiment(std::string_view name) {
  for (const ExperimentInfo& e : registry())
    if (e.name == name) return &e;
  return nullptr;
}

std::uint64_t split_seed(std::uint64_t root, std::string_view name) { return splitmix64(root ^ fnv1a64(name)); }

ExperimentReport run_experiment(const std::string& name, const RunOptions& options) {
  const ExperimentInfo* info = find_experiment(name);
  if (!info) throw ConfigError("unknown experiment '" + name + "'");
  RunContext ctx;
  ctx.seed = split_seed(options.seed, name);
  ctx.threads = options.threads;
  ctx.params = merged_params(*info, options.params);
  ctx.tolerances = options.tolerances;

  ExperimentReport r;
  r.name = name;
  r.inputs = {{"seed", options.seed}, {"params", ctx.params}};
  const auto start = std::chrono::steady_clock::now();
  try {
    info->body(ctx, r);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.error = e.what();
  }
  r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<ExperimentReport> run_config(const ExperimentConfig& config, std::size_t threads) {
  std::vector<ExperimentReport> out;
  for (std::uint64_t seed : config.seeds) {
    if (config.experiment) {
      RunOptions o{seed, threads, config.params, config.tolerances};
      // Params were merged at parse time; re-merging over the defaults is a no-op.
      ExperimentReport r = run_experiment(*config.experiment, o);
      r.name = config.name;
      r.inputs["experiment"] = *config.experiment;
      out.push_back(std::move(r));
      continue;
    }
    ExperimentReport r;
    r.name = config.name;
    r.inputs = to_json(config);
    r.inputs["seed"] = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
      run_diagnostics(config, r);
    } catch (const Error& e) {
      r.error = e.what();
    }
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentReport> run_many(const std::vector<std::string>& names, const RunOptions& options) {
  for (const std::string& n : names)
    if (!find_experiment(n)) throw ConfigError("unknown experiment '" + n + "'");
  std::vector<ExperimentReport> out(names.size());
  const std::size_t workers = std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(names.size(), 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < names.size(); ++i) out[i] = run_experiment(names[i], options);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(names.size());
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < names.size(); i = next++) {
        try {
          out[i] = run_experiment(names[i], options);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<CoverageRow> coverage(const std::vector<ExperimentReport>& reports) {
  std::vector<CoverageRow> rows;
  for (const Target& t : targets()) {
    CoverageRow row{t.id, t.experiment, to_string(t.source), t.statement, {}, false};
    for (const ExperimentReport& r : reports) {
      if (!r.inputs.contains("experiment") && r.name != t.experiment) continue;
      if (r.inputs.contains("experiment") && r.inputs.at("experiment") != t.experiment) continue;
      for (const Check& c : r.checks)
        if (c.target == t.id) row.checks.push_back(c.name);
    }
    row.covered = !row.checks.empty();
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace grpavg::harness
