#include "epiwelfare/planner.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace epiwelfare {

void GridSpec::validate() const {
  if (n_S < 3 || n_I < 3) throw std::invalid_argument("grid needs n_S, n_I >= 3");
  if (n_L < 2) throw std::invalid_argument("grid needs n_L >= 2");
}

double lockdown_cost(const EpidemicState& state, double L, const PlannerParams& params) {
  const double tau = static_cast<double>(params.tau);
  return params.w * L * (tau * (state.S + state.I) + 1.0 - tau);
}

double flow_cost(const EpidemicState& state, double L, const PlannerParams& params) {
  if (!(L >= 0.0 && L <= params.L_bar)) {
    throw std::invalid_argument("flow_cost: lockdown outside [0, L_bar]");
  }
  const double I = std::clamp(state.I, 0.0, 1.0);
  const double deaths = fatality_rate(I, params) * I;
  return lockdown_cost(state, L, params) + deaths * (params.cost_per_death + params.chi);
}

double boundary_value_s_zero(double I, const PlannerParams& params) {
  if (!(I >= 0.0 && I <= 1.0)) {
    throw std::invalid_argument("boundary_value_s_zero: infected fraction outside [0, 1]");
  }
  const double rho = params.discount();
  const double price = params.cost_per_death + params.chi;
  return price * (params.phi0 * I / (rho + params.gamma) +
                  params.kappa * I * I / (rho + 2.0 * params.gamma));
}

namespace {

// Up to two neighbours with non-negative transition weights (per year).
struct Stencil {
  std::array<std::size_t, 2> node{};
  std::array<double, 2> weight{};
  int count = 0;
  double flow = 0.0;

  void add(std::size_t n, double w) {
    if (w > 0.0) {
      node[count] = n;
      weight[count] = w;
      ++count;
    }
  }
};

Stencil build_stencil(const GridSpec& g, std::size_t i, std::size_t j, double L,
                      const PlannerParams& p) {
  const double S = g.S(i);
  const double I = g.I(j);
  const double infections = infection_flow(S, I, L, p);
  const double drift_I = infections - p.gamma * I;
  const double rate_S = infections / g.hS();

  Stencil st;
  st.flow = flow_cost(EpidemicState{S, I, 0.0, 0.0, 0.0}, L, p);

  if (drift_I > 0.0) {
    const double rate_I = drift_I / g.hI();
    const bool diag_ok = g.active(i - 1, j + 1);
    const bool up_ok = g.active(i, j + 1);
    if (diag_ok && rate_S >= rate_I) {
      st.add(g.index(i - 1, j + 1), rate_I);
      st.add(g.index(i - 1, j), rate_S - rate_I);
    } else if (diag_ok) {
      st.add(g.index(i - 1, j + 1), rate_S);
      if (up_ok) st.add(g.index(i, j + 1), rate_I - rate_S);
    } else {
      st.add(g.index(i - 1, j), rate_S);
      if (up_ok) st.add(g.index(i, j + 1), rate_I);
    }
  } else {
    st.add(g.index(i - 1, j), rate_S);
    st.add(g.index(i, j - 1), -drift_I / g.hI());
  }
  return st;
}

double stencil_ratio(const Stencil& st, const std::vector<double>& V, double rho) {
  double num = st.flow;
  double den = rho;
  for (int k = 0; k < st.count; ++k) {
    num += st.weight[k] * V[st.node[k]];
    den += st.weight[k];
  }
  return num / den;
}

bool uses_node_above(const Stencil& st, const GridSpec& g, std::size_t i, std::size_t j) {
  if (j + 1 >= g.n_I) return false;
  const std::size_t above = g.index(i, j + 1);
  for (int k = 0; k < st.count; ++k) {
    if (st.node[k] == above) return true;
  }
  return false;
}

struct NodeChoice {
  double value = 0.0;
  double L = 0.0;
  bool depends_on_above = false;
};

double control_at(std::size_t k, const GridSpec& g, const PlannerParams& p) {
  return p.L_bar * static_cast<double>(k) / static_cast<double>(g.n_L - 1);
}

NodeChoice minimize_node(const GridSpec& g, const std::vector<double>& V, std::size_t i,
                         std::size_t j, const PlannerParams& p, const SolverOptions& opt) {
  const double rho = p.discount();
  NodeChoice best;

  auto evaluate = [&](double L, bool* above) {
    const Stencil st = build_stencil(g, i, j, L, p);
    if (above) *above = uses_node_above(st, g, i, j);
    return stencil_ratio(st, V, rho);
  };

  if (opt.fixed_lockdown) {
    best.L = *opt.fixed_lockdown;
    best.value = evaluate(best.L, &best.depends_on_above);
    return best;
  }

  // Exhaustive scan; strict comparison keeps the smallest L among ties.
  std::vector<double> q(g.n_L);
  std::size_t k_best = 0;
  bool any_above = false;
  for (std::size_t k = 0; k < g.n_L; ++k) {
    bool above = false;
    q[k] = evaluate(control_at(k, g, p), &above);
    any_above = any_above || above;
    if (q[k] < q[k_best]) k_best = k;
  }
  best.L = control_at(k_best, g, p);
  best.value = q[k_best];
  best.depends_on_above = any_above;

  // One parabolic refinement around an interior minimum.
  if (k_best > 0 && k_best + 1 < g.n_L) {
    const double curvature = q[k_best - 1] - 2.0 * q[k_best] + q[k_best + 1];
    if (curvature > 0.0) {
      const double h = p.L_bar / static_cast<double>(g.n_L - 1);
      const double offset = 0.5 * h * (q[k_best - 1] - q[k_best + 1]) / curvature;
      const double L_star = std::clamp(best.L + offset, 0.0, p.L_bar);
      const double v_star = evaluate(L_star, nullptr);
      if (v_star < best.value) {
        best.value = v_star;
        best.L = L_star;
      }
    }
  }
  return best;
}

void check_options(const SolverOptions& opt, const PlannerParams& p) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument("solver tol must be > 0");
  if (opt.max_iters < 1) throw std::invalid_argument("solver max_iters must be >= 1");
  if (opt.fixed_lockdown && !(*opt.fixed_lockdown >= 0.0 && *opt.fixed_lockdown <= p.L_bar)) {
    throw std::invalid_argument("fixed_lockdown outside [0, L_bar]");
  }
}

std::size_t top_active(const GridSpec& g, std::size_t i) {
  std::size_t j = g.n_I - 1;
  while (!g.active(i, j)) --j;
  return j;
}

}  // namespace

double node_update(const ValueField& value, std::size_t i, std::size_t j, double L,
                   const PlannerParams& params) {
  const Stencil st = build_stencil(value.grid, i, j, L, params);
  return stencil_ratio(st, value.values, params.discount());
}

double node_hamiltonian(const ValueField& value, std::size_t i, std::size_t j, double L,
                        const PlannerParams& params) {
  const Stencil st = build_stencil(value.grid, i, j, L, params);
  const double v = value.at(i, j);
  double h = st.flow - params.discount() * v;
  for (int k = 0; k < st.count; ++k) h += st.weight[k] * (value.values[st.node[k]] - v);
  return h;
}

double bellman_residual(const ValueField& value, const PlannerParams& params,
                        const SolverOptions& options) {
  const GridSpec& g = value.grid;
  double residual = 0.0;
  for (std::size_t i = 1; i < g.n_S; ++i) {
    for (std::size_t j = 1; j < g.n_I && g.active(i, j); ++j) {
      const NodeChoice c = minimize_node(g, value.values, i, j, params, options);
      residual = std::max(residual, std::abs(c.value - value.at(i, j)));
    }
  }
  return residual;
}

Solution solve_value_function(const PlannerParams& params, const GridSpec& grid,
                              const SolverOptions& options) {
  params.validate();
  grid.validate();
  check_options(options, params);

  Solution sol;
  sol.value.grid = grid;
  sol.policy.grid = grid;
  sol.value.values.assign(grid.size(), 0.0);
  sol.policy.values.assign(grid.size(), 0.0);
  std::vector<double>& V = sol.value.values;
  std::vector<double>& P = sol.policy.values;

  // S = 0 edge: closed form; I = 0 edge: zero (already).
  for (std::size_t j = 1; j < grid.n_I; ++j) V[grid.index(0, j)] = boundary_value_s_zero(grid.I(j), params);

  // S only decreases, so column i depends on column i - 1 and on itself.
  // With equal spacing the split stencil never looks upward and one ascending
  // sweep per column is exact; otherwise sweep until the column settles.
  const double settle_tol = 0.1 * options.tol;
  for (std::size_t i = 1; i < grid.n_S; ++i) {
    const std::size_t j_top = top_active(grid, i);
    std::size_t sweeps = 0;
    double change = 0.0;
    while (true) {
      ++sweeps;
      change = 0.0;
      bool coupled = false;
      auto update = [&](std::size_t j) {
        const NodeChoice c = minimize_node(grid, V, i, j, params, options);
        if (!std::isfinite(c.value)) {
          std::ostringstream msg;
          msg << "non-finite value at node (" << i << ", " << j << ")";
          throw NonFiniteError(msg.str(), i, j);
        }
        const std::size_t n = grid.index(i, j);
        change = std::max(change, std::abs(c.value - V[n]));
        V[n] = c.value;
        P[n] = c.L;
        coupled = coupled || c.depends_on_above;
      };
      if (sweeps % 2 == 1) {
        for (std::size_t j = 1; j <= j_top; ++j) update(j);
      } else {
        for (std::size_t j = j_top; j >= 1; --j) update(j);
      }
      if (!coupled && sweeps == 1) break;
      if (sweeps > 1 && change <= settle_tol) break;
      if (sweeps >= options.max_iters) {
        std::ostringstream msg;
        msg << "column " << i << " did not settle within " << options.max_iters
            << " sweeps; last change " << change;
        throw NonConvergenceError(msg.str(), change);
      }
    }
    sol.stats.sweeps += sweeps;
    sol.stats.max_column_sweeps = std::max(sol.stats.max_column_sweeps, sweeps);
  }

  sol.stats.residual = bellman_residual(sol.value, params, options);
  if (!(sol.stats.residual < options.tol)) {
    std::ostringstream msg;
    msg << "Bellman residual " << sol.stats.residual << " not below tol " << options.tol;
    throw NonConvergenceError(msg.str(), sol.stats.residual);
  }
  return sol;
}

Solution solve_value_function(const PlannerParams& params, const GridSpec& grid, double tol,
                              std::size_t max_iters) {
  SolverOptions opt;
  opt.tol = tol;
  opt.max_iters = max_iters;
  return solve_value_function(params, grid, opt);
}

PolicyField constant_policy(const GridSpec& grid, double L) {
  PolicyField p;
  p.grid = grid;
  p.values.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.n_S; ++i) {
    for (std::size_t j = 0; j < grid.n_I && grid.active(i, j); ++j) p.values[grid.index(i, j)] = L;
  }
  return p;
}

double evaluate_policy(const PolicyField& policy, const PlannerParams& params,
                       const EpidemicState& state0, double horizon, double dt) {
  const double rho = params.discount();
  if (!(std::exp(-rho * horizon) < 1e-6)) {
    throw std::invalid_argument("evaluate_policy: horizon too short for the discount rate");
  }
  const ControlLaw control = [&](const EpidemicState& s) {
    return policy.lockdown(s.S, s.I, params.L_bar);
  };
  RunningIntegrand cost{1, [&](const EpidemicState& s, double L, std::span<double> out) {
                          out[0] = std::exp(-rho * s.t) * flow_cost(s, L, params);
                        }};
  const Trajectory traj = integrate_trajectory(state0, control, params, horizon, dt,
                                               /*output_stride=*/1u << 30, &cost);
  return traj.integrals[0];
}

namespace {

ScenarioRun run_scenario(const ControlLaw& control, const PlannerParams& params,
                         const EpidemicState& state0, double horizon, double dt,
                         std::size_t stride) {
  const double rho = params.discount();
  RunningIntegrand costs{2, [&](const EpidemicState& s, double L, std::span<double> out) {
                           const double disc = std::exp(-rho * s.t);
                           const double I = std::clamp(s.I, 0.0, 1.0);
                           out[0] = disc * lockdown_cost(s, L, params);
                           out[1] = disc * fatality_rate(I, params) * I *
                                    (params.cost_per_death + params.chi);
                         }};
  ScenarioRun run;
  run.trajectory = integrate_trajectory(state0, control, params, horizon, dt, stride, &costs);

  ScenarioSummary& sum = run.summary;
  const auto& samples = run.trajectory.samples;
  sum.total_deaths = samples.back().state.D;
  sum.discounted_gdp_loss = run.trajectory.integrals[0];
  sum.discounted_death_cost = run.trajectory.integrals[1];
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& s = samples[k];
    sum.peak_infected = std::max(sum.peak_infected, s.state.I);
    sum.peak_lockdown = std::max(sum.peak_lockdown, s.L);
    if (s.L > kLockdownThreshold) {
      sum.lockdown_end = s.state.t;
      if (k + 1 < samples.size()) sum.lockdown_duration += samples[k + 1].state.t - s.state.t;
    }
  }
  return run;
}

}  // namespace

ScenarioRun simulate_policy(const PolicyField& policy, const PlannerParams& params,
                            const EpidemicState& state0, double horizon, double dt,
                            std::size_t output_stride) {
  const ControlLaw control = [&](const EpidemicState& s) {
    return policy.lockdown(s.S, s.I, params.L_bar);
  };
  return run_scenario(control, params, state0, horizon, dt, output_stride);
}

ScenarioRun simulate_optimal(const PlannerParams& params, const GridSpec& grid,
                             const EpidemicState& state0, double horizon, double dt,
                             const SolverOptions& options, std::size_t output_stride) {
  const Solution sol = solve_value_function(params, grid, options);
  ScenarioRun run = simulate_policy(sol.policy, params, state0, horizon, dt, output_stride);
  run.summary.planner_value = sol.value.interpolate(state0.S, state0.I);
  return run;
}

ScenarioRun simulate_uncontrolled(const PlannerParams& params, const EpidemicState& state0,
                                  double horizon, double dt, std::size_t output_stride) {
  const ControlLaw control = [](const EpidemicState&) { return 0.0; };
  return run_scenario(control, params, state0, horizon, dt, output_stride);
}

}  // namespace epiwelfare
