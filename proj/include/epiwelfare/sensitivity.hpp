#pragma once

#include <optional>
#include <string>
#include <vector>

#include "epiwelfare/ethics.hpp"
#include "epiwelfare/planner.hpp"

namespace epiwelfare {

/// The person whose death is being priced.
struct VictimProfile {
  double lived = 30.0;          // well-being already accrued
  double remaining = 20.0;      // well-being lost if they die now
  double exchange_rate = 1.0;   // output units per well-being unit

  void validate() const;
};

/// Welfare loss, in output units, from truncating the victim's life now:
/// exchange_rate * [W(ref + (lived + remaining)) - W(ref + lived)].
double death_cost_from_criterion(const ethics::WelfareCriterion& crit,
                                 const ethics::Allocation& reference_pop,
                                 const VictimProfile& victim);

/// One planner run in a sensitivity study. Either priced by a criterion or
/// given a flat cost per death.
struct SensitivityCase {
  std::string label;
  std::optional<ethics::WelfareCriterion> criterion;
  double flat_cost = 0.0;  // used when criterion is empty

  static SensitivityCase flat(std::string label, double cost) { return {std::move(label), std::nullopt, cost}; }
  static SensitivityCase priced(const ethics::WelfareCriterion& c) { return {c.label(), c, 0.0}; }
};

struct SensitivityRow {
  std::string label;
  bool ok = true;
  std::string error;
  double cost_per_death = 0.0;
  double peak_lockdown = 0.0;
  double lockdown_years = 0.0;
  double deaths = 0.0;
  double gdp_loss = 0.0;
  double value = 0.0;  // V(S0, I0)
  PolicyField policy;
  ValueField value_field;
};

struct PolicyDifference {
  std::string a;
  std::string b;
  double supnorm = 0.0;
};

struct SensitivityReport {
  std::vector<SensitivityRow> rows;
  std::vector<PolicyDifference> differences;
};

struct SensitivitySetup {
  PlannerParams params;  // cost_per_death is overwritten per row
  GridSpec grid;
  SolverOptions solver;
  EpidemicState state0{0.98, 0.02, 0.0, 0.0, 0.0};
  double horizon = 20.0;
  double dt = 0.001;
};

/// Runs one planner solve and closed-loop simulation per case, in order.
/// Solver failures mark the row and the remaining rows still run.
SensitivityReport run_cases(const SensitivitySetup& setup, const std::vector<SensitivityCase>& cases,
                            const ethics::Allocation& reference_pop, const VictimProfile& victim);

/// Benchmark row (flat cost from setup.params, labelled "benchmark") followed
/// by one row per criterion.
SensitivityReport run_sensitivity(const SensitivitySetup& setup,
                                  const std::vector<ethics::WelfareCriterion>& criteria,
                                  const ethics::Allocation& reference_pop, const VictimProfile& victim);

/// Flat cost-per-death ladder, costs given in units of w.
SensitivityReport run_ladder(const SensitivitySetup& setup, const std::vector<double>& costs_in_w);

}  // namespace epiwelfare
