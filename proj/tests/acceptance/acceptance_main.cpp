// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "epiwelfare/commands.hpp"
#include "epiwelfare/config.hpp"
#include "epiwelfare/ethics.hpp"
#include "epiwelfare/planner.hpp"
#include "epiwelfare/sensitivity.hpp"

#ifndef EPIWELFARE_CONFIG_DIR
#define EPIWELFARE_CONFIG_DIR "config"
#endif

using namespace epiwelfare;
namespace eth = epiwelfare::ethics;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

const RunConfig& benchmark() {
  static const RunConfig cfg = load_config(EPIWELFARE_CONFIG_DIR "/benchmark.cfg");
  return cfg;
}

const Solution& benchmark_solution() {
  static const Solution sol = solve_value_function(benchmark().params, benchmark().grid,
                                                   benchmark().solver_options());
  return sol;
}

double quadrature_boundary(double I, const PlannerParams& p) {
  auto f = [&](double t) {
    const double It = I * std::exp(-p.gamma * t);
    return std::exp(-p.discount() * t) * fatality_rate(It, p) * It * (p.cost_per_death + p.chi);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-14);
}

Outcome fatality_calibration() {
  const PlannerParams& p = benchmark().params;
  const double at0 = fatality_rate(0.0, p);
  const double at40 = fatality_rate(0.4, p);
  const double eps = std::numeric_limits<double>::epsilon();
  const bool ok = at0 == 0.01 * p.gamma && std::abs(at40 - 0.03 * p.gamma) <= 2 * eps * 0.03 * p.gamma;
  return {ok, fmt("phi(0)/gamma=%.17g phi(0.4)/gamma=%.17g", at0 / p.gamma, at40 / p.gamma)};
}

Outcome boundary_fidelity() {
  const Solution& sol = benchmark_solution();
  const GridSpec& g = sol.value.grid;
  const PlannerParams& p = benchmark().params;
  bool zero_edge = true;
  for (std::size_t i = 0; i < g.n_S; ++i) zero_edge = zero_edge && sol.value.at(i, 0) == 0.0;
  double worst = 0.0;
  for (std::size_t k = 1; k <= 50; ++k) {
    const std::size_t j = k * (g.n_I - 1) / 50;
    worst = std::max(worst, std::abs(sol.value.at(0, j) - quadrature_boundary(g.I(j), p)));
  }
  return {zero_edge && worst <= 1e-8,
          fmt("V(S,0)=0 on all %zu rows: %s; max |V(0,I) - quadrature| over 50 I = %.3g", g.n_S,
              zero_edge ? "yes" : "no", worst)};
}

Outcome optimality_sandwich() {
  const RunConfig& cfg = benchmark();
  const auto t0 = Clock::now();
  const Solution sol = solve_value_function(cfg.params, cfg.grid, cfg.solver_options());
  const double solve_s = seconds_since(t0);
  const double v_opt = sol.value.interpolate(cfg.S0, cfg.I0);
  bool ok = solve_s < 60.0;
  std::ostringstream d;
  d << fmt("%zux%zu solve %.2fs, V_opt=%.6f;", cfg.grid.n_S, cfg.grid.n_I, solve_s, v_opt);
  for (double frac : {0.0, 0.25, 0.5, 1.0}) {
    const double L = frac * cfg.params.L_bar;
    const double v = evaluate_policy(constant_policy(cfg.grid, L), cfg.params, cfg.state0(), 30.0, cfg.dt);
    ok = ok && v_opt <= v + 2e-3 * cfg.params.w;
    d << fmt(" L=%.3g:%.6f", L, v);
  }
  return {ok, d.str()};
}

Outcome zero_cost_collapse() {
  RunConfig cfg = benchmark();
  cfg.params.cost_per_death = 0.0;
  cfg.params.chi = 0.0;
  const auto t0 = Clock::now();
  const Solution sol = solve_value_function(cfg.params, cfg.grid, cfg.solver_options());
  const double secs = seconds_since(t0);
  double max_v = 0.0, max_l = 0.0;
  for (double v : sol.value.values) max_v = std::max(max_v, std::abs(v));
  for (double l : sol.policy.values) max_l = std::max(max_l, std::abs(l));
  return {max_v <= 1e-10 && max_l == 0.0 && secs < 60.0,
          fmt("max|V|=%.3g max L=%.3g (%.2fs)", max_v, max_l, secs)};
}

Outcome testing_regime() {
  const RunConfig& cfg = benchmark();
  PlannerParams p1 = cfg.params, p0 = cfg.params;
  p1.tau = 1;
  p0.tau = 0;
  const auto with = simulate_optimal(p1, cfg.grid, cfg.state0(), cfg.horizon, cfg.dt, cfg.solver_options());
  const auto without = simulate_optimal(p0, cfg.grid, cfg.state0(), cfg.horizon, cfg.dt, cfg.solver_options());
  const auto none1 = simulate_uncontrolled(p1, cfg.state0(), cfg.horizon, cfg.dt);
  const auto none0 = simulate_uncontrolled(p0, cfg.state0(), cfg.horizon, cfg.dt);
  const bool ok = without.summary.lockdown_end <= with.summary.lockdown_end &&
                  with.summary.total_deaths < none1.summary.total_deaths &&
                  without.summary.total_deaths < none0.summary.total_deaths;
  return {ok, fmt("lockdown end tau=0 %.3fy <= tau=1 %.3fy; deaths tau=1 %.4f%% tau=0 %.4f%% vs uncontrolled %.4f%%",
                  without.summary.lockdown_end, with.summary.lockdown_end, 100 * with.summary.total_deaths,
                  100 * without.summary.total_deaths, 100 * none1.summary.total_deaths)};
}

Outcome headline_numbers() {
  const RunConfig& cfg = benchmark();
  const auto opt = simulate_optimal(cfg.params, cfg.grid, cfg.state0(), cfg.horizon, cfg.dt, cfg.solver_options());
  const auto none = simulate_uncontrolled(cfg.params, cfg.state0(), cfg.horizon, cfg.dt);
  const double saved = none.summary.total_deaths - opt.summary.total_deaths;
  const double gdp = opt.summary.discounted_gdp_loss;
  const double death = opt.summary.discounted_death_cost;
  const double v = opt.summary.planner_value;
  const bool ok = saved >= 0.001 && saved <= 0.02 && death > gdp;
  return {ok, fmt("deaths reduced by %.3f%% of population (reference ~0.80%%); V(S0,I0)=%.4f with death-cost "
                  "share %.3f vs GDP-loss share %.3f, ratio %.2fx (reference ~3x)",
                  100 * saved, v, death / (death + gdp), gdp / (death + gdp), death / gdp)};
}

Outcome ethics_witnesses() {
  bool ok = true;
  std::ostringstream d;
  const auto rc = eth::repugnant_witness(eth::WelfareCriterion::tu(), {100}, 0.1, 100000);
  ok = ok && rc && rc->n == 1001;
  d << "TU repugnant n=" << (rc ? std::to_string(rc->n) : "none");

  const auto clu = eth::WelfareCriterion::clu(1.0);
  const auto vs = eth::very_sadistic_witness(clu, 100);
  const bool vs_ok = vs && vs->positive == eth::Allocation::egalitarian(0.5, 5) && vs->negative == eth::Allocation{-1} &&
                     eth::criterion_value(vs->positive, clu) == -2.5 && eth::criterion_value(vs->negative, clu) == -2.0 &&
                     eth::compare(vs->positive, vs->negative, clu) == eth::Ordering::StrictlyWorse;
  ok = ok && vs_ok;
  d << "; CLU(c=1) very sadistic 5x0.5 vs (-1): " << (vs_ok ? "verified" : "not verified");

  const auto rd = eth::WelfareCriterion::rdclu(0.9, 1.0);
  const auto rd_rc = eth::repugnant_witness(rd, {100}, 0.5, 100000);
  ok = ok && !rd_rc;
  bool bounded = true;
  for (double v : {0.5, 3.0, 100.0}) {
    const double bound = std::abs(0.9 / 0.1 * (v - 1.0));
    double prev = 0.0;
    for (std::size_t n = 1; n <= 10000; ++n) {
      const double mag = std::abs(eth::egalitarian_value(v, n, rd));
      bounded = bounded && mag >= prev && mag <= bound * (1 + 1e-12);
      prev = mag;
    }
  }
  ok = ok && bounded;
  d << "; RDCLU(beta=0.9,c=1) repugnant up to 1e5: " << (rd_rc ? "found" : "none")
    << ", geometric bound " << (bounded ? "respected" : "violated");
  return {ok, d.str()};
}

Outcome axiom_suite() {
  const RunConfig& cfg = benchmark();
  const std::vector<eth::WelfareCriterion> five = {eth::WelfareCriterion::cu(), eth::WelfareCriterion::tu(),
                                                   eth::WelfareCriterion::clu(1.0), eth::WelfareCriterion::au(),
                                                   eth::WelfareCriterion::rdclu(0.5, 0.0)};
  bool a3 = true;
  for (const auto& c : five) a3 = a3 && eth::check_axiom(c, eth::Axiom::A3, 1000, cfg.seed).verdict == eth::Verdict::Pass;

  const bool a6 = eth::check_axiom(eth::WelfareCriterion::clu(1.0), eth::Axiom::A6, 1000, cfg.seed).verdict ==
                      eth::Verdict::Pass &&
                  eth::check_axiom(eth::WelfareCriterion::rdclu(0.9, 1.0), eth::Axiom::A6, 1000, cfg.seed).verdict ==
                      eth::Verdict::Pass;

  const eth::Witness hand{{{"x", {1}}, {"y", {0.6, 1.5}}}, {{"z", 3}}};
  const auto au_a4 = eth::check_axiom(eth::WelfareCriterion::au(), eth::Axiom::A4, 1000, cfg.seed);
  const bool a4 = eth::witness_violates(eth::Axiom::A4, eth::WelfareCriterion::au(), hand) &&
                  au_a4.verdict == eth::Verdict::Fail;

  std::size_t fails = 0, replayed = 0;
  for (const auto& c : five) {
    for (eth::Axiom a : {eth::Axiom::A1, eth::Axiom::A3, eth::Axiom::A4, eth::Axiom::A5, eth::Axiom::A6,
                         eth::Axiom::A8}) {
      const auto rep = eth::check_axiom(c, a, 1000, cfg.seed);
      if (rep.verdict != eth::Verdict::Fail) continue;
      ++fails;
      const auto again = eth::check_axiom(c, a, 1000, rep.seed);
      if (rep.witness && again.witness && again.verdict == eth::Verdict::Fail &&
          rep.witness->to_string() == again.witness->to_string() && eth::witness_violates(a, c, *rep.witness)) {
        ++replayed;
      }
    }
  }
  const bool ok = a3 && a6 && a4 && fails > 0 && replayed == fails;
  return {ok, fmt("A3 all five: %s; A6 CLU and RDCLU(c>=max): %s; AU A4 fails (hand witness x=(1) y=(0.6,1.5) z=3 "
                  "re-fails, search found %s); %zu/%zu fail witnesses replay",
                  a3 ? "pass" : "FAIL", a6 ? "pass" : "FAIL", au_a4.witness ? au_a4.witness->to_string().c_str() : "-",
                  replayed, fails)};
}

Outcome sensitivity_ladder() {
  const RunConfig& cfg = benchmark();
  const auto t0 = Clock::now();
  const SensitivitySetup setup = cfg.sensitivity_setup();
  const auto ladder = run_ladder(setup, {0.0, 10.0, 20.0, 40.0});
  bool ok = ladder.rows.size() == 4;
  std::ostringstream d;
  for (std::size_t k = 0; k < ladder.rows.size(); ++k) {
    const auto& r = ladder.rows[k];
    ok = ok && r.ok;
    if (k > 0) {
      ok = ok && r.deaths <= ladder.rows[k - 1].deaths + 1e-3 &&
           r.peak_lockdown >= ladder.rows[k - 1].peak_lockdown - 1e-3;
    }
    d << fmt("%s deaths=%.4f%% peakL=%.3f; ", r.label.c_str(), 100 * r.deaths, r.peak_lockdown);
  }
  const auto rep = run_sensitivity(setup, {eth::WelfareCriterion::cu()}, cfg.reference_pop, cfg.victim);
  const Solution& bench = benchmark_solution();
  const bool identical = rep.rows.size() == 2 && rep.rows[1].ok &&
                         rep.rows[1].value_field.values.size() == bench.value.values.size() &&
                         std::memcmp(rep.rows[1].value_field.values.data(), bench.value.values.data(),
                                     bench.value.values.size() * sizeof(double)) == 0 &&
                         rep.rows[1].policy.values == bench.policy.values;
  const double secs = seconds_since(t0);
  ok = ok && identical && secs < 300.0;
  d << "CU row byte-identical to benchmark: " << (identical ? "yes" : "no") << fmt(" (%.1fs)", secs);
  return {ok, d.str()};
}

Outcome determinism() {
  RunConfig cfg = benchmark();
  bool ok = true;
  std::ostringstream d;
  const std::vector<std::pair<std::string, std::function<OutputSet()>>> subs = {
      {"solve", [&] { return solve_outputs(cfg); }},
      {"simulate", [&] { return simulate_outputs(cfg, {}); }},
      {"ethics", [&] { return ethics_outputs(cfg); }},
      {"sensitivity", [&] { return sensitivity_outputs(cfg); }},
  };
  for (const auto& [name, produce] : subs) {
    const OutputSet a = produce();
    const OutputSet b = produce();
    const bool same = a == b && run_manifest(cfg, name, a) == run_manifest(cfg, name, b);
    ok = ok && same && !a.empty();
    d << name << ":" << (same ? "identical" : "DIFFERENT") << "(" << a.size() + 1 << " files) ";
  }
  return {ok, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"fatality calibration", fatality_calibration},
      {"boundary fidelity", boundary_fidelity},
      {"optimality sandwich", optimality_sandwich},
      {"zero-cost collapse", zero_cost_collapse},
      {"testing-regime ordering", testing_regime},
      {"headline numbers", headline_numbers},
      {"population-ethics witnesses", ethics_witnesses},
      {"axiom suite", axiom_suite},
      {"sensitivity ladder", sensitivity_ladder},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    if (!out.pass) ++failed;
    std::printf("[%s] %zu %s: %s\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
