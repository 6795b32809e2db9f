#include "epiwelfare/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "epiwelfare/format.hpp"

namespace epiwelfare {

namespace {

constexpr std::string_view kDefaultCriteria = "CU;TU;CLU(c=1);AU;RDCLU(beta=0.5,c=0)";

struct Key {
  std::string_view name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::size_t parse_count(std::string_view v) {
  const long long n = parse_integer(v);
  if (n < 0) throw std::invalid_argument("must be a non-negative integer");
  return static_cast<std::size_t>(n);
}

std::string join_levels(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) s += ',';
    s += format_exact(v[k]);
  }
  return s;
}

std::vector<double> parse_levels(std::string_view v) {
  std::vector<double> out;
  for (auto part : split(v, ',')) out.push_back(parse_double(part));
  return out;
}

#define REAL_KEY(NAME, FIELD)                                                  \
  Key {                                                                        \
    NAME, [](RunConfig& c, std::string_view v) { c.FIELD = parse_double(v); }, \
        [](const RunConfig& c) { return format_exact(c.FIELD); }               \
  }
#define COUNT_KEY(NAME, FIELD)                                                \
  Key {                                                                       \
    NAME, [](RunConfig& c, std::string_view v) { c.FIELD = parse_count(v); }, \
        [](const RunConfig& c) { return std::to_string(c.FIELD); }            \
  }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      REAL_KEY("beta", params.beta_contact),
      REAL_KEY("gamma", params.gamma),
      REAL_KEY("phi0", params.phi0),
      REAL_KEY("kappa", params.kappa),
      REAL_KEY("theta", params.theta),
      REAL_KEY("L_bar", params.L_bar),
      Key{"tau", [](RunConfig& c, std::string_view v) { c.params.tau = static_cast<int>(parse_integer(v)); },
          [](const RunConfig& c) { return std::to_string(c.params.tau); }},
      REAL_KEY("r", params.r),
      REAL_KEY("nu", params.nu),
      REAL_KEY("w", params.w),
      REAL_KEY("cost_per_death", params.cost_per_death),
      REAL_KEY("chi", params.chi),
      COUNT_KEY("n_S", grid.n_S),
      COUNT_KEY("n_I", grid.n_I),
      COUNT_KEY("n_L", grid.n_L),
      REAL_KEY("tol", tol),
      COUNT_KEY("max_iters", max_iters),
      REAL_KEY("S0", S0),
      REAL_KEY("I0", I0),
      REAL_KEY("horizon", horizon),
      REAL_KEY("dt", dt),
      COUNT_KEY("output_stride", output_stride),
      Key{"criteria", [](RunConfig& c, std::string_view v) { c.criteria = ethics::parse_criteria(v); },
          [](const RunConfig& c) {
            std::string s;
            for (std::size_t k = 0; k < c.criteria.size(); ++k) {
              if (k) s += ';';
              s += c.criteria[k].label();
            }
            return s;
          }},
      Key{"seed", [](RunConfig& c, std::string_view v) { c.seed = static_cast<std::uint64_t>(parse_count(v)); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      COUNT_KEY("samples", samples),
      COUNT_KEY("pop_cap", universe.pop_cap),
      REAL_KEY("level_lo", universe.lo),
      REAL_KEY("level_hi", universe.hi),
      REAL_KEY("repugnant_base", repugnant_base),
      REAL_KEY("repugnant_epsilon", repugnant_epsilon),
      COUNT_KEY("repugnant_n_max", repugnant_n_max),
      COUNT_KEY("sadistic_n_max", sadistic_n_max),
      Key{"reference_pop",
          [](RunConfig& c, std::string_view v) { c.reference_pop = ethics::Allocation(parse_levels(v)); },
          [](const RunConfig& c) { return join_levels(c.reference_pop.levels()); }},
      REAL_KEY("victim_lived", victim.lived),
      REAL_KEY("victim_remaining", victim.remaining),
      REAL_KEY("exchange_rate", victim.exchange_rate),
      Key{"ladder", [](RunConfig& c, std::string_view v) { c.ladder = parse_levels(v); },
          [](const RunConfig& c) { return join_levels(c.ladder); }},
      Key{"out_dir", [](RunConfig& c, std::string_view v) { c.out_dir = std::string(trim(v)); },
          [](const RunConfig& c) { return c.out_dir; }},
  };
  return table;
}

#undef REAL_KEY
#undef COUNT_KEY

struct Check {
  std::string_view key;
  std::function<bool(const RunConfig&)> ok;
  std::string_view message;
};

const std::vector<Check>& checks() {
  static const std::vector<Check> table = {
      {"beta", [](const RunConfig& c) { return c.params.beta_contact > 0.0; }, "must be > 0"},
      {"gamma", [](const RunConfig& c) { return c.params.gamma > 0.0; }, "must be > 0"},
      {"phi0", [](const RunConfig& c) { return c.params.phi0 > 0.0 && c.params.phi0 <= c.params.gamma; },
       "must lie in (0, gamma]"},
      {"kappa",
       [](const RunConfig& c) { return c.params.kappa >= 0.0 && c.params.phi0 + c.params.kappa <= c.params.gamma; },
       "must be >= 0 with phi0 + kappa <= gamma"},
      {"theta", [](const RunConfig& c) { return c.params.theta > 0.0 && c.params.theta < 1.0; },
       "must lie in (0, 1)"},
      {"L_bar", [](const RunConfig& c) { return c.params.L_bar > 0.0 && c.params.L_bar <= 1.0; },
       "must lie in (0, 1]"},
      {"tau", [](const RunConfig& c) { return c.params.tau == 0 || c.params.tau == 1; }, "must be 0 or 1"},
      {"r", [](const RunConfig& c) { return c.params.r > 0.0; }, "must be > 0"},
      {"nu", [](const RunConfig& c) { return c.params.nu > 0.0; }, "must be > 0"},
      {"w", [](const RunConfig& c) { return c.params.w > 0.0; }, "must be > 0"},
      {"cost_per_death", [](const RunConfig& c) { return c.params.cost_per_death >= 0.0; }, "must be >= 0"},
      {"chi", [](const RunConfig& c) { return c.params.chi >= 0.0; }, "must be >= 0"},
      {"n_S", [](const RunConfig& c) { return c.grid.n_S >= 3; }, "must be >= 3"},
      {"n_I", [](const RunConfig& c) { return c.grid.n_I >= 3; }, "must be >= 3"},
      {"n_L", [](const RunConfig& c) { return c.grid.n_L >= 2; }, "must be >= 2"},
      {"tol", [](const RunConfig& c) { return c.tol > 0.0; }, "must be > 0"},
      {"max_iters", [](const RunConfig& c) { return c.max_iters >= 1; }, "must be >= 1"},
      {"S0", [](const RunConfig& c) { return c.S0 >= 0.0 && c.S0 <= 1.0; }, "must lie in [0, 1]"},
      {"I0", [](const RunConfig& c) { return c.I0 >= 0.0 && c.I0 <= 1.0 && c.S0 + c.I0 <= 1.0; },
       "must lie in [0, 1] with S0 + I0 <= 1"},
      {"horizon", [](const RunConfig& c) { return c.horizon > 0.0; }, "must be > 0"},
      {"dt",
       [](const RunConfig& c) { return c.dt > 0.0 && c.dt <= stability_bound(c.params) * (1.0 + 1e-12); },
       "must lie in (0, 0.1 / max(beta, gamma)]"},
      {"output_stride", [](const RunConfig& c) { return c.output_stride >= 1; }, "must be >= 1"},
      {"samples", [](const RunConfig& c) { return c.samples >= 1; }, "must be >= 1"},
      {"pop_cap", [](const RunConfig& c) { return c.universe.pop_cap >= 2; }, "must be >= 2"},
      {"level_hi", [](const RunConfig& c) { return c.universe.lo < c.universe.hi; }, "must exceed level_lo"},
      {"repugnant_epsilon",
       [](const RunConfig& c) { return c.repugnant_epsilon > 0.0 && c.repugnant_base > c.repugnant_epsilon; },
       "must be > 0 and below repugnant_base"},
      {"repugnant_n_max", [](const RunConfig& c) { return c.repugnant_n_max >= 1; }, "must be >= 1"},
      {"sadistic_n_max", [](const RunConfig& c) { return c.sadistic_n_max >= 1; }, "must be >= 1"},
      {"victim_remaining", [](const RunConfig& c) { return c.victim.remaining >= 0.0; }, "must be >= 0"},
      {"exchange_rate", [](const RunConfig& c) { return c.victim.exchange_rate > 0.0; }, "must be > 0"},
      {"ladder",
       [](const RunConfig& c) {
         for (double v : c.ladder) {
           if (!(v >= 0.0)) return false;
         }
         return true;
       },
       "entries must be >= 0"},
      {"out_dir", [](const RunConfig& c) { return !c.out_dir.empty(); }, "must not be empty"},
  };
  return table;
}

void run_checks(const RunConfig& cfg, const std::map<std::string, std::size_t, std::less<>>& lines) {
  for (const auto& check : checks()) {
    if (!check.ok(cfg)) {
      const auto it = lines.find(check.key);
      const std::size_t line = it == lines.end() ? 0 : it->second;
      throw ConfigError(line, std::string(check.key), std::string(check.message));
    }
  }
}

}  // namespace

RunConfig::RunConfig() : criteria(ethics::parse_criteria(kDefaultCriteria)) {}

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.tol = tol;
  o.max_iters = max_iters;
  return o;
}

SensitivitySetup RunConfig::sensitivity_setup() const {
  SensitivitySetup s;
  s.params = params;
  s.grid = grid;
  s.solver = solver_options();
  s.state0 = state0();
  s.horizon = horizon;
  s.dt = dt;
  return s;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return serialize_config(a) == serialize_config(b);
}

ConfigError::ConfigError(std::size_t line, std::string key, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string("default: ")) +
                         key + " " + message),
      line_(line),
      key_(std::move(key)) {}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, std::size_t, std::less<>> lines;

  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    auto line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(line_no, std::string(line), "is not a key = value pair");
    const std::string key(trim(line.substr(0, eq)));
    const auto value = trim(line.substr(eq + 1));

    const Key* entry = nullptr;
    for (const auto& k : keys()) {
      if (k.name == key) entry = &k;
    }
    if (!entry) throw ConfigError(line_no, key, "is not a known key");
    if (lines.count(key)) throw ConfigError(line_no, key, "is given twice");
    try {
      entry->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(line_no, key, std::string("has a malformed value: ") + e.what());
    }
    lines[key] = line_no;
  }

  if (!lines.count("phi0")) cfg.params.phi0 = 0.01 * cfg.params.gamma;
  if (!lines.count("kappa")) cfg.params.kappa = 0.05 * cfg.params.gamma;

  run_checks(cfg, lines);
  return cfg;
}

void validate_config(const RunConfig& config) { run_checks(config, {}); }

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "config", "file cannot be read: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& k : keys()) {
    out += std::string(k.name) + " = " + k.get(config) + "\n";
  }
  return out;
}

}  // namespace epiwelfare
