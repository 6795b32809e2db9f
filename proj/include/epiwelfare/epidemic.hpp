#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace epiwelfare {

/// Compartment fractions of the initial (normalised) population at time t.
/// S + I + R + D = 1; D counts cumulative deaths, so the alive mass is 1 - D.
struct EpidemicState {
  double S = 1.0;
  double I = 0.0;
  double R = 0.0;
  double D = 0.0;
  double t = 0.0;  // years
};

/// Model constants for the SIR-with-lockdown planner. All rates are per year.
struct PlannerParams {
  double beta_contact = 73.0;             // 0.2 per day
  double gamma = 365.0 / 18.0;            // 18-day mean infectious period
  double phi0 = 0.01 * (365.0 / 18.0);    // baseline death rate coefficient
  double kappa = 0.05 * (365.0 / 18.0);   // congestion slope of the death rate
  double theta = 0.5;                     // lockdown effectiveness
  double L_bar = 0.7;                     // maximum lockdown fraction
  int tau = 1;                            // 1: recovered are tested and exempt
  double r = 0.05;                        // pure discount rate
  double nu = 1.0 / 1.5;                  // vaccine arrival hazard
  double w = 1.0;                         // output per worker per year
  double cost_per_death = 20.0;           // output units lost per death
  double chi = 0.0;                       // additional death penalty

  /// Effective discount rate r + nu.
  double discount() const { return r + nu; }

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

struct Derivatives {
  double dS = 0.0;
  double dI = 0.0;
  double dR = 0.0;
  double dD = 0.0;
};

/// One output sample: the state and the lockdown applied at that state.
struct TrajectorySample {
  EpidemicState state;
  double L = 0.0;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  /// Final values of the integrals requested through a RunningIntegrand.
  std::vector<double> integrals;
};

/// Lockdown fraction as a function of the current state (closed loop).
using ControlLaw = std::function<double(const EpidemicState&)>;

/// Extra quantities integrated alongside the state, e.g. discounted costs.
/// `eval` writes `dim` integrand values for the given state and control.
struct RunningIntegrand {
  std::size_t dim = 0;
  std::function<void(const EpidemicState&, double L, std::span<double> out)> eval;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Death rate phi(I) = phi0 + kappa * I.
double fatality_rate(double I, const PlannerParams& params);

/// Right-hand side of the controlled SIR-D system.
Derivatives sir_derivatives(const EpidemicState& state, double L, const PlannerParams& params);

/// New-infection flow beta * S * I * (1 - theta L)^2.
double infection_flow(double S, double I, double L, const PlannerParams& params);

double basic_reproduction_number(const PlannerParams& params);

/// Largest step accepted by integrate_trajectory: 0.1 / max(beta, gamma).
double stability_bound(const PlannerParams& params);

/// Fixed-step RK4 integration over [0, horizon]. The control law is evaluated
/// at every Runge-Kutta stage. Samples are recorded every `output_stride`
/// steps plus the final step.
Trajectory integrate_trajectory(const EpidemicState& state0, const ControlLaw& control,
                                const PlannerParams& params, double horizon, double dt,
                                std::size_t output_stride = 1,
                                const RunningIntegrand* integrand = nullptr);

/// Throws std::invalid_argument unless the state lies on the normalised simplex.
void validate_state(const EpidemicState& state);

}  // namespace epiwelfare
