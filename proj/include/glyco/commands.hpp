// The batch commands behind the `glyco` executable. Each command writes its
// artifacts under config.output_dir, prints a short summary in config.format
// and returns a structured result for programmatic callers.
#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "glyco/config.hpp"
#include "glyco/estimation.hpp"
#include "glyco/identifiability.hpp"

namespace glyco {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct SimulateResult {
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> files;
};
SimulateResult cmd_simulate(const ExperimentConfig& config, std::ostream& out);

struct CompareReplicate {
  std::uint64_t seed = 0;
  double sup_a1 = 0.0;
  double sup_a2 = 0.0;
};
struct CompareResult {
  std::vector<CompareReplicate> replicates;
  double median_sup_a1 = 0.0;
  double median_sup_a2 = 0.0;
};
/// Sup-distances are taken over the compare.dt output grid.
CompareResult cmd_compare(const ExperimentConfig& config, std::ostream& out);

struct ValidateResult {
  FastAverageStats stats;
  std::array<double, kNumFast> closed_form{};
  std::array<bool, kNumFast> within_3se{};
  bool balance_within_3se = false;
  bool pass = false;
};
ValidateResult cmd_validate_averaging(const ExperimentConfig& config, std::ostream& out);

struct EstimateResult {
  EstimationResult estimation;
  ReportRow row;
  Vec8 theta_true{};
};
EstimateResult cmd_estimate(const ExperimentConfig& config, std::ostream& out);

struct IdentifyResult {
  OrbitPoints points;
  IdentifiabilityReport report;
};
IdentifyResult cmd_identify(const ExperimentConfig& config, std::ostream& out);

/// Requires model.J1 and model.J2.
EffectiveParams cmd_map_params(const ExperimentConfig& config, std::ostream& out);

/// Runs a command by name and maps failures to exit codes: 2 for configuration
/// and domain errors, 3 for numerical failures, 1 otherwise.
int run_command(std::string_view name, const ExperimentConfig& config, std::ostream& out,
                std::ostream& err);

}  // namespace glyco
