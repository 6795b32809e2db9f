#include "epiwelfare/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "epiwelfare/format.hpp"

namespace epiwelfare {

void VictimProfile::validate() const {
  if (!(std::isfinite(lived) && std::isfinite(remaining) && remaining >= 0.0)) {
    throw std::invalid_argument("victim needs finite lived and remaining >= 0");
  }
  if (!(exchange_rate > 0.0 && std::isfinite(exchange_rate))) {
    throw std::invalid_argument("victim exchange_rate must be > 0");
  }
}

double death_cost_from_criterion(const ethics::WelfareCriterion& crit,
                                 const ethics::Allocation& reference_pop,
                                 const VictimProfile& victim) {
  crit.validate();
  victim.validate();
  const auto alive = reference_pop.with(victim.lived + victim.remaining);
  const auto dead = reference_pop.with(victim.lived);
  return victim.exchange_rate *
         (ethics::criterion_value(alive, crit) - ethics::criterion_value(dead, crit));
}

namespace {

SensitivityRow run_row(const SensitivitySetup& setup, const std::string& label, double cost) {
  SensitivityRow row;
  row.label = label;
  row.cost_per_death = cost;
  try {
    PlannerParams params = setup.params;
    params.cost_per_death = cost;
    Solution sol = solve_value_function(params, setup.grid, setup.solver);
    const ScenarioRun run = simulate_policy(sol.policy, params, setup.state0, setup.horizon, setup.dt);
    row.peak_lockdown = run.summary.peak_lockdown;
    row.lockdown_years = run.summary.lockdown_duration;
    row.deaths = run.summary.total_deaths;
    row.gdp_loss = run.summary.discounted_gdp_loss;
    row.value = sol.value.interpolate(setup.state0.S, setup.state0.I);
    row.policy = std::move(sol.policy);
    row.value_field = std::move(sol.value);
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

void fill_differences(SensitivityReport& report) {
  for (std::size_t a = 0; a < report.rows.size(); ++a) {
    for (std::size_t b = a + 1; b < report.rows.size(); ++b) {
      const auto& ra = report.rows[a];
      const auto& rb = report.rows[b];
      PolicyDifference d{ra.label, rb.label, std::nan("")};
      if (ra.ok && rb.ok) {
        d.supnorm = 0.0;
        for (std::size_t k = 0; k < ra.policy.values.size(); ++k) {
          d.supnorm = std::max(d.supnorm, std::abs(ra.policy.values[k] - rb.policy.values[k]));
        }
      }
      report.differences.push_back(d);
    }
  }
}

}  // namespace

SensitivityReport run_cases(const SensitivitySetup& setup, const std::vector<SensitivityCase>& cases,
                            const ethics::Allocation& reference_pop, const VictimProfile& victim) {
  if (cases.empty()) throw std::invalid_argument("sensitivity needs at least one case");
  SensitivityReport report;
  for (const auto& c : cases) {
    const double cost = c.criterion ? death_cost_from_criterion(*c.criterion, reference_pop, victim)
                                    : c.flat_cost;
    if (!(std::isfinite(cost) && cost >= 0.0)) {
      SensitivityRow row;
      row.label = c.label;
      row.ok = false;
      row.cost_per_death = cost;
      row.error = "derived cost per death " + format_csv(cost) + " is not a valid non-negative price";
      report.rows.push_back(std::move(row));
      continue;
    }
    report.rows.push_back(run_row(setup, c.label, cost));
  }
  fill_differences(report);
  return report;
}

SensitivityReport run_sensitivity(const SensitivitySetup& setup,
                                  const std::vector<ethics::WelfareCriterion>& criteria,
                                  const ethics::Allocation& reference_pop, const VictimProfile& victim) {
  if (criteria.empty()) throw std::invalid_argument("sensitivity needs at least one criterion");
  std::vector<SensitivityCase> cases{SensitivityCase::flat("benchmark", setup.params.cost_per_death)};
  for (const auto& c : criteria) cases.push_back(SensitivityCase::priced(c));
  return run_cases(setup, cases, reference_pop, victim);
}

SensitivityReport run_ladder(const SensitivitySetup& setup, const std::vector<double>& costs_in_w) {
  std::vector<SensitivityCase> cases;
  for (double c : costs_in_w) {
    cases.push_back(SensitivityCase::flat("flat(" + format_exact(c) + "w)", c * setup.params.w));
  }
  return run_cases(setup, cases, ethics::Allocation{0.0}, VictimProfile{});
}

}  // namespace epiwelfare
