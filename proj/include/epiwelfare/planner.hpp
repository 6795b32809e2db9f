#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiwelfare/epidemic.hpp"

namespace epiwelfare {

/// Uniform grid on [0,1]^2 restricted to the simplex S + I <= 1.
/// Node (i, j) sits at S = i / (n_S - 1), I = j / (n_I - 1).
struct GridSpec {
  std::size_t n_S = 300;
  std::size_t n_I = 300;
  std::size_t n_L = 51;

  void validate() const;

  double S(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(n_S - 1); }
  double I(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(n_I - 1); }
  double hS() const { return 1.0 / static_cast<double>(n_S - 1); }
  double hI() const { return 1.0 / static_cast<double>(n_I - 1); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * n_I + j; }
  std::size_t size() const { return n_S * n_I; }

  /// True when node (i, j) lies in the simplex; exact integer test.
  bool active(std::size_t i, std::size_t j) const {
    return i < n_S && j < n_I && i * (n_I - 1) + j * (n_S - 1) <= (n_S - 1) * (n_I - 1);
  }
};

/// Per-node scalar sampled on the simplex part of a GridSpec. Entries of
/// nodes outside the simplex are unused and held at zero.
struct GridField {
  GridSpec grid;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }

  /// Piecewise-linear lookup: bilinear inside full cells, barycentric on the
  /// lower-left triangle of cells cut by the S + I = 1 edge. Points outside
  /// the simplex are projected onto it first.
  double interpolate(double S, double I) const;
};

/// Minimal discounted loss V(S, I) in output units.
struct ValueField : GridField {};

/// Optimal lockdown fraction L(S, I) in [0, L_bar].
struct PolicyField : GridField {
  /// Interpolated lockdown clamped to [0, L_bar].
  double lockdown(double S, double I, double L_bar) const;
};

PolicyField constant_policy(const GridSpec& grid, double L);

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iters = 1000;
  /// Restricts the control set to a single value (policy evaluation mode).
  std::optional<double> fixed_lockdown;
};

struct SolveStats {
  std::size_t sweeps = 0;        // total column sweeps performed
  std::size_t max_column_sweeps = 0;
  double residual = 0.0;         // sup-norm of V - T(V) over interior nodes
};

struct Solution {
  ValueField value;
  PolicyField policy;
  SolveStats stats;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonConvergenceError : public SolverError {
 public:
  NonConvergenceError(const std::string& what, double residual)
      : SolverError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NonFiniteError : public SolverError {
 public:
  NonFiniteError(const std::string& what, std::size_t i, std::size_t j)
      : SolverError(what), i_(i), j_(j) {}
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }

 private:
  std::size_t i_, j_;
};

/// Planner loss flow: GDP lost to lockdown plus priced deaths.
double flow_cost(const EpidemicState& state, double L, const PlannerParams& params);

/// GDP part of flow_cost only.
double lockdown_cost(const EpidemicState& state, double L, const PlannerParams& params);

/// Closed-form value on the S = 0 edge, where no new infections occur and
/// infections decay as I e^{-gamma t}.
double boundary_value_s_zero(double I, const PlannerParams& params);

/// Solves the discretised Bellman equation on the grid. Interior nodes use
/// monotone upwind differences; drift with dI > 0 is split along the
/// (-dS, +dI) diagonal and the -S axis so every stencil stays in the simplex.
Solution solve_value_function(const PlannerParams& params, const GridSpec& grid,
                              const SolverOptions& options = {});

/// Same as above with tol and max_iters given directly.
Solution solve_value_function(const PlannerParams& params, const GridSpec& grid, double tol,
                              std::size_t max_iters);

/// Fixed-point residual max |V - T(V)| for a given field.
double bellman_residual(const ValueField& value, const PlannerParams& params,
                        const SolverOptions& options = {});

/// Value of one control at an interior node given the neighbouring values:
/// (flow + sum w_k V_k) / (rho + sum w_k). Exposed for verification.
double node_update(const ValueField& value, std::size_t i, std::size_t j, double L,
                   const PlannerParams& params);

/// Discounted HJB Hamiltonian flow + b . grad V - rho V at node (i, j) for
/// control L, using the same upwind stencil as the solver.
double node_hamiltonian(const ValueField& value, std::size_t i, std::size_t j, double L,
                        const PlannerParams& params);

/// Discounted total cost of following `policy` from state0 under the
/// continuous dynamics, integrated with the RK4 trajectory integrator.
double evaluate_policy(const PolicyField& policy, const PlannerParams& params,
                       const EpidemicState& state0, double horizon, double dt);

struct ScenarioSummary {
  double total_deaths = 0.0;
  double discounted_gdp_loss = 0.0;
  double discounted_death_cost = 0.0;
  double peak_infected = 0.0;
  double peak_lockdown = 0.0;
  double lockdown_duration = 0.0;   // years with L > lockdown_threshold
  double lockdown_end = 0.0;        // last sampled time with L > lockdown_threshold
  double planner_value = 0.0;       // V(S0, I0) interpolated; 0 when uncontrolled
};

inline constexpr double kLockdownThreshold = 0.01;

struct ScenarioRun {
  Trajectory trajectory;
  ScenarioSummary summary;
};

/// Closed-loop trajectory under the interpolated optimal policy.
ScenarioRun simulate_policy(const PolicyField& policy, const PlannerParams& params,
                            const EpidemicState& state0, double horizon, double dt,
                            std::size_t output_stride = 1);

/// Solves the planner problem and simulates the closed loop.
ScenarioRun simulate_optimal(const PlannerParams& params, const GridSpec& grid,
                             const EpidemicState& state0, double horizon, double dt,
                             const SolverOptions& options = {}, std::size_t output_stride = 1);

/// Trajectory with L = 0 throughout.
ScenarioRun simulate_uncontrolled(const PlannerParams& params, const EpidemicState& state0,
                                  double horizon, double dt, std::size_t output_stride = 1);

}  // namespace epiwelfare
