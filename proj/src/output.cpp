#include "epiwelfare/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "epiwelfare/format.hpp"

namespace epiwelfare::io {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,S,I,R,D,L\n";
  for (const auto& s : traj.samples) {
    out += format_csv(s.state.t) + ',' + format_csv(s.state.S) + ',' + format_csv(s.state.I) + ',' +
           format_csv(s.state.R) + ',' + format_csv(s.state.D) + ',' + format_csv(s.L) + '\n';
  }
  return out;
}

std::string field_csv(const ValueField& value, const PolicyField& policy) {
  const GridSpec& g = value.grid;
  std::string out = "S,I,V,L\n";
  for (std::size_t i = 0; i < g.n_S; ++i) {
    for (std::size_t j = 0; j < g.n_I && g.active(i, j); ++j) {
      out += format_csv(g.S(i)) + ',' + format_csv(g.I(j)) + ',' + format_csv(value.at(i, j)) + ',' +
             format_csv(policy.at(i, j)) + '\n';
    }
  }
  return out;
}

std::string policy_csv(const PolicyField& policy) {
  const GridSpec& g = policy.grid;
  std::string out = "S,I,L\n";
  for (std::size_t i = 0; i < g.n_S; ++i) {
    for (std::size_t j = 0; j < g.n_I && g.active(i, j); ++j) {
      out += format_csv(g.S(i)) + ',' + format_csv(g.I(j)) + ',' + format_csv(policy.at(i, j)) + '\n';
    }
  }
  return out;
}

std::string key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string summary_text(const ScenarioSummary& s) {
  return key_values({
      {"total_deaths", format_csv(s.total_deaths)},
      {"discounted_gdp_loss", format_csv(s.discounted_gdp_loss)},
      {"discounted_death_cost", format_csv(s.discounted_death_cost)},
      {"peak_infected", format_csv(s.peak_infected)},
      {"peak_lockdown", format_csv(s.peak_lockdown)},
      {"lockdown_duration", format_csv(s.lockdown_duration)},
      {"lockdown_end", format_csv(s.lockdown_end)},
      {"planner_value", format_csv(s.planner_value)},
  });
}

namespace {

std::string report_property(const ethics::AxiomReport& r) {
  return std::string(ethics::axiom_name(r.axiom));
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string axiom_csv(const std::vector<ethics::AxiomReport>& reports) {
  std::string out = "criterion,property,verdict,witness\n";
  for (const auto& r : reports) {
    out += csv_field(r.criterion) + ',' + csv_field(report_property(r)) + ',' +
           std::string(ethics::to_string(r.verdict)) + ',' +
           csv_field(r.witness ? r.witness->to_string() : "") + '\n';
  }
  return out;
}

std::string axiom_table(const std::vector<ethics::AxiomReport>& reports) {
  std::string out = pad("criterion", 28) + pad("axiom", 46) + pad("verdict", 26) + pad("samples", 9) +
                    "seed  witness / note\n";
  for (const auto& r : reports) {
    std::string detail = r.witness ? r.witness->to_string() : "";
    if (!r.note.empty()) detail += (detail.empty() ? "" : "  ") + ("[" + r.note + "]");
    out += pad(r.criterion, 28) + pad(report_property(r), 46) +
           pad(std::string(ethics::to_string(r.verdict)), 26) + pad(std::to_string(r.samples_tested), 9) +
           pad(std::to_string(r.seed), 6) + detail + '\n';
  }
  return out;
}

std::string matrix_csv(const std::vector<ethics::MatrixCell>& cells) {
  std::string out = "criterion,property,verdict,witness\n";
  for (const auto& c : cells) {
    out += csv_field(c.criterion) + ',' + c.property + ',' + std::string(ethics::to_string(c.verdict)) + ',' +
           csv_field(c.witness) + '\n';
  }
  return out;
}

std::string matrix_table(const std::vector<ethics::MatrixCell>& cells) {
  std::string out = pad("criterion", 28) + pad("property", 34) + pad("verdict", 26) + pad("tabulated", 11) +
                    "witness\n";
  for (const auto& c : cells) {
    const std::string tab = c.tabulated ? (*c.tabulated ? "yes" : "no") : "-";
    out += pad(c.criterion, 28) + pad(c.property, 34) + pad(std::string(ethics::to_string(c.verdict)), 26) +
           pad(tab, 11) + c.witness + '\n';
  }
  return out;
}

std::string sensitivity_csv(const SensitivityReport& report) {
  std::string out = "criterion,cost_per_death,peak_L,lockdown_years,deaths,gdp_loss,value\n";
  for (const auto& r : report.rows) {
    auto num = [&](double v) { return r.ok ? format_csv(v) : std::string("nan"); };
    out += csv_field(r.label) + ',' + format_csv(r.cost_per_death) + ',' + num(r.peak_lockdown) + ',' +
           num(r.lockdown_years) + ',' + num(r.deaths) + ',' + num(r.gdp_loss) + ',' + num(r.value) + '\n';
  }
  return out;
}

std::string policy_difference_csv(const SensitivityReport& report) {
  std::string out = "criterion_a,criterion_b,policy_supnorm_diff\n";
  for (const auto& d : report.differences) {
    out += csv_field(d.a) + ',' + csv_field(d.b) + ',' +
           (std::isnan(d.supnorm) ? std::string("nan") : format_csv(d.supnorm)) + '\n';
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError(path.parent_path(), "cannot create directory: " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError(path, "cannot open for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw OutputError(path, "write failed");
}

}  // namespace epiwelfare::io
