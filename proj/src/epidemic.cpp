#include "epiwelfare/epidemic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace epiwelfare {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

constexpr double kCompartmentSlack = 1e-12;

}  // namespace

void PlannerParams::validate() const {
  require(std::isfinite(beta_contact) && beta_contact > 0.0, "beta_contact must be > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be > 0");
  require(phi0 > 0.0 && phi0 <= gamma, "phi0 must lie in (0, gamma]");
  require(kappa >= 0.0 && phi0 + kappa <= gamma, "kappa must be >= 0 with phi0 + kappa <= gamma");
  require(theta > 0.0 && theta < 1.0, "theta must lie in (0, 1)");
  require(L_bar > 0.0 && L_bar <= 1.0, "L_bar must lie in (0, 1]");
  require(tau == 0 || tau == 1, "tau must be 0 or 1");
  require(std::isfinite(r) && r > 0.0, "r must be > 0");
  require(std::isfinite(nu) && nu > 0.0, "nu must be > 0");
  require(std::isfinite(w) && w > 0.0, "w must be > 0");
  require(std::isfinite(cost_per_death) && cost_per_death >= 0.0, "cost_per_death must be >= 0");
  require(std::isfinite(chi) && chi >= 0.0, "chi must be >= 0");
}

void validate_state(const EpidemicState& s) {
  for (double v : {s.S, s.I, s.R, s.D}) {
    require(std::isfinite(v) && v >= -kCompartmentSlack && v <= 1.0 + kCompartmentSlack,
            "compartments must lie in [0, 1]");
  }
  require(std::abs(s.S + s.I + s.R + s.D - 1.0) <= 1e-9, "compartments must sum to 1");
}

double fatality_rate(double I, const PlannerParams& params) {
  if (!(I >= 0.0 && I <= 1.0)) {
    throw std::invalid_argument("fatality_rate: infected fraction outside [0, 1]");
  }
  return params.phi0 + params.kappa * I;
}

double infection_flow(double S, double I, double L, const PlannerParams& params) {
  const double reach = 1.0 - params.theta * L;
  return params.beta_contact * S * I * reach * reach;
}

Derivatives sir_derivatives(const EpidemicState& state, double L, const PlannerParams& params) {
  if (!(L >= 0.0 && L <= params.L_bar)) {
    std::ostringstream msg;
    msg << "sir_derivatives: lockdown " << L << " outside [0, " << params.L_bar << "]";
    throw std::invalid_argument(msg.str());
  }
  // RK4 stages may overshoot by rounding; the death rate is evaluated on the clamped I.
  const double I_eff = std::clamp(state.I, 0.0, 1.0);
  const double new_infections = infection_flow(state.S, state.I, L, params);
  const double exits = params.gamma * state.I;
  const double deaths = fatality_rate(I_eff, params) * state.I;

  Derivatives d;
  d.dS = -new_infections;
  d.dI = new_infections - exits;
  d.dD = deaths;
  d.dR = exits - deaths;
  return d;
}

double basic_reproduction_number(const PlannerParams& params) {
  if (!(params.gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  return params.beta_contact / params.gamma;
}

double stability_bound(const PlannerParams& params) {
  return 0.1 / std::max(params.beta_contact, params.gamma);
}

Trajectory integrate_trajectory(const EpidemicState& state0, const ControlLaw& control,
                                const PlannerParams& params, double horizon, double dt,
                                std::size_t output_stride, const RunningIntegrand* integrand) {
  params.validate();
  validate_state(state0);
  require(horizon > 0.0, "horizon must be > 0");
  require(dt > 0.0, "dt must be > 0");
  // Relative slack so that dt == bound written in decimal is not rejected.
  require(dt <= stability_bound(params) * (1.0 + 1e-12), "dt exceeds the stability bound 0.1/max(beta, gamma)");
  require(output_stride >= 1, "output_stride must be >= 1");

  const std::size_t q_dim = integrand ? integrand->dim : 0;
  const std::size_t dim = 4 + q_dim;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));

  std::vector<double> y(dim, 0.0);
  y[0] = state0.S;
  y[1] = state0.I;
  y[2] = state0.R;
  y[3] = state0.D;

  auto as_state = [](std::span<const double> v, double t) {
    return EpidemicState{v[0], v[1], v[2], v[3], t};
  };

  std::vector<double> q_out(q_dim);
  auto rhs = [&](std::span<const double> v, double t, std::span<double> out) -> double {
    const EpidemicState s = as_state(v, t);
    const double L = control(s);
    const Derivatives d = sir_derivatives(s, L, params);
    out[0] = d.dS;
    out[1] = d.dI;
    out[2] = d.dR;
    out[3] = d.dD;
    if (q_dim > 0) {
      integrand->eval(s, L, std::span<double>(q_out));
      std::copy(q_out.begin(), q_out.end(), out.begin() + 4);
    }
    return L;
  };

  std::vector<double> k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);

  Trajectory traj;
  traj.samples.reserve(steps / output_stride + 2);
  auto record = [&](double t) {
    const EpidemicState s = as_state(y, t);
    traj.samples.push_back({s, control(s)});
  };

  double t = state0.t;
  record(t);
  for (std::size_t n = 0; n < steps; ++n) {
    rhs(y, t, k1);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(tmp, t + 0.5 * dt, k2);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(tmp, t + 0.5 * dt, k3);
    for (std::size_t i = 0; i < dim; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(tmp, t + dt, k4);
    for (std::size_t i = 0; i < dim; ++i) {
      y[i] += dt / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]);
    }
    t = state0.t + static_cast<double>(n + 1) * dt;

    for (std::size_t i = 0; i < 4; ++i) {
      if (!std::isfinite(y[i]) || y[i] < -kCompartmentSlack || y[i] > 1.0 + kCompartmentSlack) {
        std::ostringstream msg;
        msg << "integration step rejected at t=" << t << ": compartment " << "SIRD"[i]
            << " = " << y[i] << " left [0, 1]";
        throw IntegrationError(msg.str(), t);
      }
    }
    if ((n + 1) % output_stride == 0 || n + 1 == steps) record(t);
  }
  traj.integrals.assign(y.begin() + 4, y.end());
  return traj;
}

}  // namespace epiwelfare
