#include "glyco/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "glyco/io.hpp"

namespace glyco {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_real(const std::string& key, const std::string& v) {
  try {
    const double d = parse_double(v);
    if (!std::isfinite(d)) throw ConfigError(key, "value must be finite");
    return d;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + v + "'");
  }
}

double to_positive(const std::string& key, const std::string& v) {
  const double d = to_real(key, v);
  if (!(d > 0.0)) throw ConfigError(key, "value must be positive");
  return d;
}

double to_nonnegative(const std::string& key, const std::string& v) {
  const double d = to_real(key, v);
  if (!(d >= 0.0)) throw ConfigError(key, "value must be nonnegative");
  return d;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError(key, "expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

std::size_t to_count(const std::string& key, const std::string& v) {
  const auto c = to_unsigned(key, v);
  if (c == 0) throw ConfigError(key, "value must be at least 1");
  return static_cast<std::size_t>(c);
}

std::vector<double> to_list(const std::string& key, const std::string& v, std::size_t size) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_real(key, trim(item)));
  if (out.size() != size) {
    throw ConfigError(key, "expected " + std::to_string(size) + " comma-separated values");
  }
  return out;
}

SlowState to_slow(const std::string& key, const std::string& v) {
  const auto z = to_list(key, v, 3);
  if (z[0] < 0.0 || z[1] < 0.0) throw ConfigError(key, "z_A1, z_A2 must be nonnegative");
  if (!(z[2] > 0.0)) throw ConfigError(key, "z_A4 must be positive");
  return {z[0], z[1], z[2]};
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

std::map<std::string, Setter> build_schema() {
  std::map<std::string, Setter> s;
  for (std::size_t r = 0; r < kNumRates; ++r) {
    s["model." + std::string(rate_name(static_cast<Rate>(r)))] =
        [r](ExperimentConfig& c, const std::string& k, const std::string& v) {
          c.model.kappa[r] = to_nonnegative(k, v);
        };
  }
  s["model.n"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.model.n = static_cast<std::int64_t>(to_count(k, v));
  };
  s["model.T"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.model.horizon = to_positive(k, v);
  };
  s["model.J1"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.model.j1 = to_real(k, v);
  };
  s["model.J2"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.model.j2 = to_real(k, v);
  };
  s["model.z0"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.model.z0 = to_slow(k, v);
  };
  s["model.x0"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    const auto vals = to_list(k, v, kNumSpecies);
    State x{};
    for (std::size_t i = 0; i < kNumSpecies; ++i) {
      if (vals[i] < 0.0 || vals[i] != std::floor(vals[i])) {
        throw ConfigError(k, "counts must be nonnegative integers");
      }
      x[i] = static_cast<std::int64_t>(vals[i]);
    }
    c.model.x0 = x;
  };

  s["run.seed"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.seed = to_unsigned(k, v);
  };
  s["run.jobs"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.jobs = to_count(k, v);
  };

  s["simulate.replicates"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.replicates = to_count(k, v);
  };
  s["simulate.record"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if (v == "all") c.recording.mode = RecordingMode::kAllJumps;
    else if (v == "slow") c.recording.mode = RecordingMode::kSlowChanges;
    else if (v == "every") c.recording.mode = RecordingMode::kEveryNth;
    else if (v == "grid") c.recording.mode = RecordingMode::kGrid;
    else throw ConfigError(k, "expected all | slow | every | grid");
  };
  s["simulate.record_every"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.recording.every = to_count(k, v);
  };
  s["simulate.record_dt"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.recording.dt = to_positive(k, v);
  };

  s["compare.replicates"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.compare_replicates = to_count(k, v);
  };
  s["compare.dt"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.compare_dt = to_positive(k, v);
  };

  s["validate.z"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.validate_z = to_slow(k, v);
  };
  s["validate.T"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.validate_horizon = to_positive(k, v);
  };
  s["validate.burn_in"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.validate_burn_in = to_nonnegative(k, v);
    if (c.validate_burn_in >= 1.0) throw ConfigError(k, "burn-in fraction must be below 1");
  };
  s["validate.batches"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.validate_batches = to_count(k, v);
    if (c.validate_batches < 2) throw ConfigError(k, "need at least 2 batches");
  };
  s["validate.activation_scale"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.validate_activation_scale = to_nonnegative(k, v);
  };

  s["estimate.m"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.m = to_count(k, v);
  };
  s["estimate.data"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if (v == "ssa") c.estimate.data = DataSource::kSsa;
    else if (v == "ode") c.estimate.data = DataSource::kOde;
    else if (v == "file") c.estimate.data = DataSource::kFile;
    else throw ConfigError(k, "expected ssa | ode | file");
  };
  s["estimate.data_file"] = [](ExperimentConfig& c, const std::string&, const std::string& v) {
    c.estimate.data_file = v;
  };
  s["estimate.grid_intervals"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.loss.grid_intervals = to_count(k, v);
  };
  s["estimate.penalty"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.loss.penalty = to_positive(k, v);
  };
  s["estimate.ode_rtol"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.loss.ode.rtol = to_positive(k, v);
  };
  s["estimate.ode_atol"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.loss.ode.atol = to_positive(k, v);
  };
  s["estimate.x_tol"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.nelder_mead.x_tol = to_positive(k, v);
  };
  s["estimate.f_tol"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.nelder_mead.f_tol = to_positive(k, v);
  };
  s["estimate.max_iters"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.nelder_mead.max_iters = to_count(k, v);
  };
  s["estimate.initial_step"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.nelder_mead.initial_step = to_positive(k, v);
  };
  s["estimate.max_restarts"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.nelder_mead.max_restarts = static_cast<std::size_t>(to_unsigned(k, v));
  };
  s["estimate.convergence_ratio"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.estimate.options.convergence_ratio = to_nonnegative(k, v);
  };
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    s["estimate.box." + std::string(EffectiveParams::name(i))] =
        [i](ExperimentConfig& c, const std::string& k, const std::string& v) {
          const auto b = to_list(k, v, 2);
          auto bounds = c.estimate.box.bounds();
          bounds[i] = Interval{b[0], b[1]};
          try {
            c.estimate.box = ParamBox(bounds);
          } catch (const DomainError& e) {
            throw ConfigError(k, e.what());
          }
        };
  }

  s["identify.strategy"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    try {
      c.identify_strategy = parse_strategy(v);
    } catch (const DomainError& e) {
      throw ConfigError(k, e.what());
    }
  };
  s["identify.tol_cond"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.identify_tol_cond = to_positive(k, v);
  };
  s["identify.candidates"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.identify_selection.candidates = to_count(k, v);
  };
  s["identify.pool"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    c.identify_selection.pool = to_count(k, v);
    if (c.identify_selection.pool < kNumOrbitPoints) throw ConfigError(k, "pool must be at least 12");
  };

  s["output.dir"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if (v.empty()) throw ConfigError(k, "must not be empty");
    c.output_dir = v;
  };
  s["output.format"] = [](ExperimentConfig& c, const std::string& k, const std::string& v) {
    if (v != "csv" && v != "json") throw ConfigError(k, "expected csv | json");
    c.format = v;
  };
  return s;
}

}  // namespace

State ModelConfig::initial_state() const {
  if (x0) return *x0;
  const double nn = static_cast<double>(n);
  State x{};
  x[idx(Species::A1)] = std::llround(z0.a1 * nn);
  x[idx(Species::A2)] = std::llround(z0.a2 * nn);
  x[idx(Species::A3)] = 1;
  x[idx(Species::A4)] = std::llround(z0.a4 * nn * nn);
  const double j1v = j1_or_default();
  const double j2v = j2_or_default();
  if (j1v < 0.0 || j1v != std::floor(j1v)) throw ConfigError("model.J1", "enzyme total must be a nonnegative integer");
  if (j2v < 0.0 || j2v != std::floor(j2v)) throw ConfigError("model.J2", "enzyme total must be a nonnegative integer");
  x[idx(Species::E1)] = static_cast<std::int64_t>(j1v);
  x[idx(Species::E2)] = static_cast<std::int64_t>(j2v);
  if (x[idx(Species::A4)] <= 0) throw ConfigError("model.z0", "z_A4 n^2 must round to a positive count");
  return x;
}

ExperimentConfig parse_config(const std::string& text) {
  static const std::map<std::string, Setter> schema = build_schema();
  ExperimentConfig config;
  std::map<std::string, bool> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = schema.find(key);
    if (it == schema.end()) throw ConfigError(key, "unknown key");
    if (seen[key]) throw ConfigError(key, "duplicate key");
    seen[key] = true;
    if (value.empty()) throw ConfigError(key, "missing value");
    it->second(config, key, value);
  }
  if (config.estimate.data == DataSource::kFile && config.estimate.data_file.empty()) {
    throw ConfigError("estimate.data_file", "required when estimate.data = file");
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("", e.what());
  }
  return parse_config(text);
}

}  // namespace glyco
