#include <cmath>

#include <gtest/gtest.h>

#include "epiwelfare/sensitivity.hpp"

using namespace epiwelfare;
using ethics::Allocation;
using ethics::WelfareCriterion;

namespace {

const Allocation kReference{50, 50};

SensitivitySetup small_setup() {
  SensitivitySetup s;
  s.grid = GridSpec{101, 101, 26};
  s.horizon = 20.0;
  return s;
}

}  // namespace

TEST(DeathCost, CriterionExamples) {
  const VictimProfile victim;
  EXPECT_DOUBLE_EQ(death_cost_from_criterion(WelfareCriterion::cu(), kReference, victim), 20.0);
  EXPECT_DOUBLE_EQ(death_cost_from_criterion(WelfareCriterion::tu(), kReference, victim), 20.0);
  EXPECT_NEAR(death_cost_from_criterion(WelfareCriterion::au(), kReference, victim), 20.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(death_cost_from_criterion(WelfareCriterion::rdclu(0.5, 0.0), kReference, victim), 10.0);
  EXPECT_DOUBLE_EQ(death_cost_from_criterion(WelfareCriterion::clu(1.0), kReference, victim), 20.0);
}

TEST(DeathCost, ExchangeRateScales) {
  VictimProfile victim;
  victim.exchange_rate = 1.5;
  EXPECT_DOUBLE_EQ(death_cost_from_criterion(WelfareCriterion::cu(), kReference, victim), 30.0);
  victim.remaining = 0.0;
  EXPECT_DOUBLE_EQ(death_cost_from_criterion(WelfareCriterion::au(), kReference, victim), 0.0);
}

TEST(DeathCost, RejectsInvalidVictim) {
  VictimProfile victim;
  victim.remaining = -1.0;
  EXPECT_THROW(death_cost_from_criterion(WelfareCriterion::cu(), kReference, victim), std::invalid_argument);
  victim.remaining = 20.0;
  victim.exchange_rate = 0.0;
  EXPECT_THROW(death_cost_from_criterion(WelfareCriterion::cu(), kReference, victim), std::invalid_argument);
}

TEST(Sensitivity, ReportShape) {
  const auto crits = std::vector<WelfareCriterion>{WelfareCriterion::cu(), WelfareCriterion::au()};
  const SensitivityReport rep = run_sensitivity(small_setup(), crits, kReference, VictimProfile{});
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_EQ(rep.rows[0].label, "benchmark");
  EXPECT_EQ(rep.rows[1].label, "CU");
  EXPECT_EQ(rep.rows[2].label, "AU");
  EXPECT_EQ(rep.differences.size(), 3u);
  for (const auto& r : rep.rows) EXPECT_TRUE(r.ok) << r.error;
}

TEST(Sensitivity, BenchmarkIdentity) {
  const SensitivitySetup setup = small_setup();
  const auto rep = run_sensitivity(setup, {WelfareCriterion::cu()}, kReference, VictimProfile{});
  const Solution direct = solve_value_function(setup.params, setup.grid, setup.solver);
  EXPECT_EQ(rep.rows[1].value_field.values, direct.value.values);
  EXPECT_EQ(rep.rows[1].policy.values, direct.policy.values);
  EXPECT_EQ(rep.rows[0].value_field.values, rep.rows[1].value_field.values);
  EXPECT_EQ(rep.differences[0].supnorm, 0.0);
}

TEST(Sensitivity, ZeroCostRow) {
  const SensitivitySetup setup = small_setup();
  const auto rep = run_ladder(setup, {0.0});
  ASSERT_EQ(rep.rows.size(), 1u);
  const auto& row = rep.rows[0];
  for (double L : row.policy.values) EXPECT_EQ(L, 0.0);
  for (double v : row.value_field.values) EXPECT_EQ(v, 0.0);
  const ScenarioRun none = simulate_uncontrolled(setup.params, setup.state0, setup.horizon, setup.dt);
  EXPECT_EQ(row.deaths, none.summary.total_deaths);
  EXPECT_EQ(row.peak_lockdown, 0.0);
}

TEST(Sensitivity, LadderMonotone) {
  const auto rep = run_ladder(small_setup(), {0.0, 10.0, 20.0, 40.0});
  ASSERT_EQ(rep.rows.size(), 4u);
  EXPECT_EQ(rep.rows[1].label, "flat(10w)");
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    EXPECT_LE(rep.rows[k].deaths, rep.rows[k - 1].deaths + 1e-3);
    EXPECT_GE(rep.rows[k].peak_lockdown, rep.rows[k - 1].peak_lockdown - 1e-3);
    EXPECT_GT(rep.rows[k].value, rep.rows[k - 1].value);
  }
}

TEST(Sensitivity, FailedRowIsMarkedAndOthersContinue) {
  const std::vector<SensitivityCase> cases = {SensitivityCase::flat("negative", -1.0),
                                              SensitivityCase::flat("benchmark", 20.0)};
  const auto rep = run_cases(small_setup(), cases, kReference, VictimProfile{});
  ASSERT_EQ(rep.rows.size(), 2u);
  EXPECT_FALSE(rep.rows[0].ok);
  EXPECT_FALSE(rep.rows[0].error.empty());
  EXPECT_TRUE(rep.rows[1].ok);
  EXPECT_GT(rep.rows[1].peak_lockdown, 0.0);
  ASSERT_EQ(rep.differences.size(), 1u);
  EXPECT_TRUE(std::isnan(rep.differences[0].supnorm));
}

TEST(Sensitivity, Deterministic) {
  const auto crits = std::vector<WelfareCriterion>{WelfareCriterion::rdclu(0.5, 0.0)};
  const auto a = run_sensitivity(small_setup(), crits, kReference, VictimProfile{});
  const auto b = run_sensitivity(small_setup(), crits, kReference, VictimProfile{});
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    EXPECT_EQ(a.rows[k].value_field.values, b.rows[k].value_field.values);
    EXPECT_EQ(a.rows[k].deaths, b.rows[k].deaths);
  }
}
