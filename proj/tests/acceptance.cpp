// One PASS/FAIL line per acceptance criterion. A criterion passes when its
// experiments run without error, every check citing its targets passes,
// each target has at least one check and the wall time is within budget.

#include <chrono>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "grpavg/harness/experiments.hpp"
#include "grpavg/harness/report.hpp"

using namespace grpavg::harness;

namespace {

struct Criterion {
  int id;
  std::string summary;
  std::vector<std::string> experiments;
  std::vector<std::string> targets;
  double budget_s;
};

const std::vector<Criterion> criteria{
    {1, "asymptotic variances of the 3-state example", {"asympvar-3state"},
     {"asympvar.v_P", "asympvar.v_orbit", "asympvar.v_la_ra"}, 1},
    {2, "Frobenius Pythagorean counterexamples", {"frobenius-counterexamples"},
     {"frobenius.first.lhs", "frobenius.first.rhs", "frobenius.first.sign", "frobenius.second.lhs",
      "frobenius.second.rhs", "frobenius.second.sign"},
     1},
    {3, "uniform shift averages to the projector and mixes in one step", {"uniform-shift"},
     {"uniform_shift.la_is_Pi", "uniform_shift.tmix_one"}, 5},
    {4, "DHN gamma = 0 and mixing-time slopes", {"dhn-counterexample"}, {"dhn.gamma_zero", "dhn.mixing_trend"}, 60},
    {5, "V-shape gap bounds, mixing and ratio growth", {"vshape", "vshape-perturbed"},
     {"vshape.gap_bound", "vshape.rapid_mixing", "vshape.torpid_mixing", "vshape.ratio_growth",
      "vshape_perturbed.gap_bound", "vshape_perturbed.rapid_mixing"},
     60},
    {6, "n-cycle block reversal gap and mixing", {"ncycle-blockrev"},
     {"ncycle.gap", "ncycle.rapid_mixing", "ncycle.srw_lower"}, 60},
    {7, "random batteries", {"random-batteries"},
     {"battery.gamma", "battery.gamma_sd", "battery.pythagorean", "battery.pythagorean_sd", "battery.mixing_sandwich",
      "battery.cheeger", "battery.asympvar_reduction", "battery.inheritance"},
     300},
    {8, "Swendsen-Wang, parallel tempering and PMMH oracles", {"sw-check", "pt-check", "pmmh-check"},
     {"sw.marginal_match", "sw.potts_marginal", "pt.direct_match", "pmmh.stationary", "pmmh.marginal"}, 30},
};

} // namespace

int main() {
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<ExperimentReport> reports;
    std::string problem;
    for (const std::string& name : c.experiments) {
      try {
        reports.push_back(run_experiment(name));
      } catch (const std::exception& e) {
        problem = name + ": " + e.what();
      }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const std::set<std::string> wanted(c.targets.begin(), c.targets.end());
    std::set<std::string> seen;
    std::size_t total = 0, passed = 0;
    for (const ExperimentReport& r : reports) {
      if (r.error && problem.empty()) problem = r.name + ": " + *r.error;
      for (const Check& k : r.checks) {
        if (!wanted.count(k.target)) continue;
        seen.insert(k.target);
        ++total;
        if (k.pass) ++passed;
        else std::printf("  violated [%s] %s margin=%s\n", k.target.c_str(), k.name.c_str(),
                         format_number(k.margin).c_str());
      }
    }
    for (const std::string& t : c.targets)
      if (!seen.count(t) && problem.empty()) problem = "no check cites " + t;
    if (secs > c.budget_s && problem.empty()) problem = "over the " + format_number(c.budget_s) + " s budget";

    const bool ok = problem.empty() && passed == total;
    if (!ok) ++failed;
    std::printf("%s criterion %d: %s (%zu/%zu checks, %.3f s)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.summary.c_str(),
                passed, total, secs, problem.empty() ? "" : " - ", problem.c_str());
  }
  return failed == 0 ? 0 : 1;
}
