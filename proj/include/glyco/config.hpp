// Experiment configuration: flat "section.key = value" text with '#' comments.
// Unknown and duplicate keys are rejected; every error names the offending key.
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "glyco/estimation.hpp"
#include "glyco/identifiability.hpp"
#include "glyco/network.hpp"
#include "glyco/reduced.hpp"
#include "glyco/ssa.hpp"

namespace glyco {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct ModelConfig {
  RateTable kappa = RateConstants::reference().values();
  std::int64_t n = 100;
  double horizon = 20.0;
  std::optional<double> j1;  // E1-family total; simulation commands default to 5
  std::optional<double> j2;
  SlowState z0{1.0, 1.0, 1.0};
  std::optional<State> x0;  // overrides the state built from z0, J1, J2

  double j1_or_default() const { return j1.value_or(5.0); }
  double j2_or_default() const { return j2.value_or(5.0); }
  /// Integer initial state of the n-th chain.
  State initial_state() const;
};

enum class DataSource { kSsa, kOde, kFile };

struct EstimateConfig {
  std::size_t m = 50;
  DataSource data = DataSource::kSsa;
  std::string data_file;  // trajectory CSV written by `simulate` (data = file)
  ParamBox box = ParamBox::reference();
  EstimationOptions options;
};

struct ExperimentConfig {
  ModelConfig model;

  std::uint64_t seed = 1;
  std::size_t jobs = 1;

  std::size_t replicates = 1;
  RecordingOptions recording;

  std::size_t compare_replicates = 1;
  double compare_dt = 0.05;

  SlowState validate_z{1.0, 1.0, 1.0};
  double validate_horizon = 1e4;
  double validate_burn_in = 0.5;
  std::size_t validate_batches = 50;
  double validate_activation_scale = 0.01;

  EstimateConfig estimate;

  SelectionStrategy identify_strategy = SelectionStrategy::kEquitime;
  double identify_tol_cond = 1e12;
  SelectionOptions identify_selection;

  std::filesystem::path output_dir = "out";
  std::string format = "csv";  // csv | json (stdout summary)
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace glyco
