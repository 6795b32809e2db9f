#pragma once

#include <cmath>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "epiwelfare/ethics.hpp"
#include "epiwelfare/planner.hpp"
#include "epiwelfare/sensitivity.hpp"

namespace epiwelfare {

/// Everything a CLI run needs. Text form: one `key = value` per line, `#`
/// starts a comment. Omitted keys keep the defaults below; phi0 and kappa
/// default to 0.01 * gamma and 0.05 * gamma when not given.
struct RunConfig {
  PlannerParams params;
  GridSpec grid;
  double tol = 1e-8;
  std::size_t max_iters = 1000;

  double S0 = 0.98;
  double I0 = 0.02;
  double horizon = 20.0;
  double dt = 0.001;
  std::size_t output_stride = 1;

  std::vector<ethics::WelfareCriterion> criteria;
  std::uint64_t seed = 1;
  std::size_t samples = 1000;
  ethics::Universe universe;
  double repugnant_base = 100.0;
  double repugnant_epsilon = 0.1;
  std::size_t repugnant_n_max = 100000;
  std::size_t sadistic_n_max = 100;

  ethics::Allocation reference_pop{50.0, 50.0};
  VictimProfile victim;
  std::vector<double> ladder{0.0, 10.0, 20.0, 40.0};

  std::string out_dir = "out";

  RunConfig();

  EpidemicState state0() const {
    const double r = 1.0 - S0 - I0;
    return {S0, I0, std::abs(r) < 1e-15 ? 0.0 : r, 0.0, 0.0};
  }
  SolverOptions solver_options() const;
  SensitivitySetup sensitivity_setup() const;

  friend bool operator==(const RunConfig&, const RunConfig&);
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string key, const std::string& message);
  /// 1-based line of the offending entry; 0 when the value came from defaults.
  std::size_t line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  std::size_t line_;
  std::string key_;
};

/// Parses and validates. Throws ConfigError naming the line and key.
RunConfig parse_config(std::string_view text);

/// Reads a file and parses it; I/O failures are reported as ConfigError.
RunConfig load_config(const std::string& path);

/// Every key with its resolved value, in a fixed order, exact decimal text.
std::string serialize_config(const RunConfig& config);

/// Re-runs the parse-time validation on a config built in code.
void validate_config(const RunConfig& config);

}  // namespace epiwelfare
