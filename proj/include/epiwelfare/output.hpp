#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "epiwelfare/ethics.hpp"
#include "epiwelfare/planner.hpp"
#include "epiwelfare/sensitivity.hpp"

namespace epiwelfare::io {

class OutputError : public std::runtime_error {
 public:
  OutputError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// 64-bit FNV-1a, stable across platforms.
std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t v);

std::string trajectory_csv(const Trajectory& traj);                        // t,S,I,R,D,L
std::string field_csv(const ValueField& value, const PolicyField& policy);  // S,I,V,L
std::string policy_csv(const PolicyField& policy);                          // S,I,L
std::string summary_text(const ScenarioSummary& summary);                   // key=value

/// criterion,property,verdict,witness
std::string axiom_csv(const std::vector<ethics::AxiomReport>& reports);
std::string axiom_table(const std::vector<ethics::AxiomReport>& reports);
std::string matrix_csv(const std::vector<ethics::MatrixCell>& cells);
std::string matrix_table(const std::vector<ethics::MatrixCell>& cells);

/// criterion,cost_per_death,peak_L,lockdown_years,deaths,gdp_loss,value
std::string sensitivity_csv(const SensitivityReport& report);
/// criterion_a,criterion_b,policy_supnorm_diff
std::string policy_difference_csv(const SensitivityReport& report);

std::string key_values(const KeyValues& kv);

/// Quotes a CSV field when it contains a comma, quote or newline.
std::string csv_field(std::string_view s);

/// Creates parent directories as needed and writes `contents` verbatim.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace epiwelfare::io
