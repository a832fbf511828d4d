#include "glyco/commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <json.hpp>

#include "glyco/io.hpp"
#include "glyco/parallel.hpp"
#include "glyco/reduced.hpp"
#include "glyco/rng.hpp"
#include "glyco/ssa.hpp"

namespace glyco {

namespace {

using Json = nlohmann::ordered_json;

// Stream ids for derive_seed; replicates use 1 + r.
constexpr std::uint64_t kEstimateStartsStream = 1u << 20;
constexpr std::uint64_t kIdentifyStream = (1u << 20) + 1;

std::string dump(const Json& j) { return j.dump(2) + '\n'; }

Json theta_json(const Vec8& theta) {
  Json j;
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) j[std::string(EffectiveParams::name(i))] = theta[i];
  return j;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 == 1 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// The grid t_i = i * (T / intervals), with the last point pinned to T.
std::vector<double> uniform_grid(double horizon, std::size_t intervals) {
  std::vector<double> grid(intervals + 1);
  const double h = horizon / static_cast<double>(intervals);
  for (std::size_t i = 0; i < intervals; ++i) grid[i] = static_cast<double>(i) * h;
  grid[intervals] = horizon;
  return grid;
}

std::size_t intervals_for(double horizon, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(horizon / dt)));
}

EffectiveParams model_theta(const RateTable& kappa, double j1, double j2) {
  return effective_params(RateConstants(kappa), j1, j2);
}

void print_table(std::ostream& out, const std::string& format, const Json& summary,
                 const std::string& csv) {
  if (format == "json") {
    out << dump(summary);
  } else {
    out << csv;
  }
}

}  // namespace

SimulateResult cmd_simulate(const ExperimentConfig& config, std::ostream& out) {
  const State x0 = config.model.initial_state();
  const ScalingRegime regime(config.model.n);
  SimulateResult result;
  result.seeds.resize(config.replicates);
  result.files.resize(config.replicates);
  std::vector<std::uint64_t> jumps(config.replicates);
  std::vector<std::size_t> records(config.replicates);
  parallel_for(config.replicates, config.jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.seed, r + 1);
    const Trajectory traj =
        simulate(x0, config.model.kappa, regime, config.model.horizon, seed, config.recording);
    const std::string stem = "trajectory_" + std::to_string(r);
    write_file(config.output_dir / (stem + ".csv"), trajectory_csv(traj));
    write_file(config.output_dir / (stem + ".json"),
               trajectory_sidecar_json(traj, config.model.kappa, r));
    result.seeds[r] = seed;
    result.files[r] = stem + ".csv";
    jumps[r] = traj.jumps;
    records[r] = traj.times.size();
  });

  Json summary = Json::array();
  std::string csv = "replicate,seed,jumps,records,file\n";
  for (std::size_t r = 0; r < config.replicates; ++r) {
    summary.push_back({{"replicate", r}, {"seed", result.seeds[r]}, {"jumps", jumps[r]},
                       {"records", records[r]}, {"file", result.files[r]}});
    csv += std::to_string(r) + ',' + std::to_string(result.seeds[r]) + ',' +
           std::to_string(jumps[r]) + ',' + std::to_string(records[r]) + ',' + result.files[r] + '\n';
  }
  print_table(out, config.format, summary, csv);
  return result;
}

CompareResult cmd_compare(const ExperimentConfig& config, std::ostream& out) {
  const State x0 = config.model.initial_state();
  const ScalingRegime regime(config.model.n);
  const ConservationTotals totals = conservation_totals(x0);
  const EffectiveParams theta = model_theta(config.model.kappa, static_cast<double>(totals.j1),
                                            static_cast<double>(totals.j2));
  const std::size_t intervals = intervals_for(config.model.horizon, config.compare_dt);
  const std::vector<double> grid = uniform_grid(config.model.horizon, intervals);
  RecordingOptions rec;
  rec.mode = RecordingMode::kGrid;
  rec.dt = config.model.horizon / static_cast<double>(intervals);

  CompareResult result;
  result.replicates.resize(config.compare_replicates);
  parallel_for(config.compare_replicates, config.jobs, [&](std::size_t r) {
    const std::uint64_t seed = derive_seed(config.seed, r + 1);
    const Trajectory traj = simulate(x0, config.model.kappa, regime, config.model.horizon, seed, rec);
    const Dataset data = scaled_slow_view(traj, regime);
    const OdeSolution sol =
        solve_reduced(theta, {data.a1.front(), data.a2.front(), data.a4_initial}, data.horizon);
    OdeSolution::Cursor ode(sol);
    CompareReplicate rep{seed, 0.0, 0.0};
    std::string csv = "t,z_A1,z_A2,Z_A1,Z_A2\n";
    for (double t : grid) {
      const auto z = data.at(t);
      const auto zz = ode(t);
      rep.sup_a1 = std::max(rep.sup_a1, std::abs(z[0] - zz[0]));
      rep.sup_a2 = std::max(rep.sup_a2, std::abs(z[1] - zz[1]));
      csv += format_double(t) + ',' + format_double(z[0]) + ',' + format_double(z[1]) + ',' +
             format_double(zz[0]) + ',' + format_double(zz[1]) + '\n';
    }
    write_file(config.output_dir / ("compare_" + std::to_string(r) + ".csv"), csv);
    result.replicates[r] = rep;
  });

  std::vector<double> s1;
  std::vector<double> s2;
  Json reps = Json::array();
  std::string csv = "replicate,seed,sup_A1,sup_A2\n";
  for (std::size_t r = 0; r < result.replicates.size(); ++r) {
    const auto& rep = result.replicates[r];
    s1.push_back(rep.sup_a1);
    s2.push_back(rep.sup_a2);
    reps.push_back({{"replicate", r}, {"seed", rep.seed}, {"sup_A1", rep.sup_a1}, {"sup_A2", rep.sup_a2}});
    csv += std::to_string(r) + ',' + std::to_string(rep.seed) + ',' + format_double(rep.sup_a1) +
           ',' + format_double(rep.sup_a2) + '\n';
  }
  result.median_sup_a1 = median(s1);
  result.median_sup_a2 = median(s2);
  Json summary;
  summary["n"] = config.model.n;
  summary["horizon"] = config.model.horizon;
  summary["grid_dt"] = rec.dt;
  summary["theta"] = theta_json(theta.values());
  summary["replicates"] = reps;
  summary["median_sup_A1"] = result.median_sup_a1;
  summary["median_sup_A2"] = result.median_sup_a2;
  write_file(config.output_dir / "compare_summary.json", dump(summary));
  print_table(out, config.format, summary, csv);
  return result;
}

ValidateResult cmd_validate_averaging(const ExperimentConfig& config, std::ostream& out) {
  const double j1 = config.model.j1_or_default();
  const double j2 = config.model.j2_or_default();
  const State x0 = config.model.initial_state();
  FastState zf0{};
  zf0[fast::kA3] = x0[idx(Species::A3)];
  zf0[fast::kE1] = x0[idx(Species::E1)];
  zf0[fast::kE1Star] = x0[idx(Species::E1Star)];
  zf0[fast::kE1A1] = x0[idx(Species::E1A1)];
  zf0[fast::kE1StarA1] = x0[idx(Species::E1StarA1)];
  zf0[fast::kE2] = x0[idx(Species::E2)];
  zf0[fast::kE2A2] = x0[idx(Species::E2A2)];

  const RateConstants kappa(config.model.kappa);
  FrozenFastOptions ff;
  ff.activation_scale = config.validate_activation_scale;
  const FastTrajectory traj = simulate_frozen_fast(config.validate_z, zf0, config.model.kappa,
                                                   config.validate_horizon,
                                                   derive_seed(config.seed, 1), ff);
  ValidateResult result;
  result.stats = fast_average_stats(traj, config.model.kappa, config.validate_burn_in,
                                    config.validate_batches);
  result.closed_form = stationary_means(kappa, j1, j2, config.validate_z);

  static constexpr const char* kNames[kNumFast] = {"A3", "E1", "E1star", "E1A1", "E1starA1", "E2", "E2A2"};
  auto within = [](double diff, double se) { return se > 0.0 ? std::abs(diff) <= 3.0 * se : diff == 0.0; };
  Json species = Json::array();
  std::string csv = "quantity,empirical,standard_error,closed_form,z_score,within_3se\n";
  result.pass = true;
  for (std::size_t i = 0; i < kNumFast; ++i) {
    const double diff = result.stats.mean[i] - result.closed_form[i];
    const double se = result.stats.standard_error[i];
    result.within_3se[i] = within(diff, se);
    result.pass = result.pass && result.within_3se[i];
    const double z = se > 0.0 ? diff / se : 0.0;
    species.push_back({{"species", kNames[i]}, {"empirical", result.stats.mean[i]},
                       {"standard_error", se}, {"closed_form", result.closed_form[i]},
                       {"z_score", z}, {"within_3se", result.within_3se[i]}});
    csv += std::string(kNames[i]) + ',' + format_double(result.stats.mean[i]) + ',' +
           format_double(se) + ',' + format_double(result.closed_form[i]) + ',' + format_double(z) +
           ',' + (result.within_3se[i] ? "true" : "false") + '\n';
  }
  const double bal = result.stats.activation_balance;
  const double bal_se = result.stats.activation_balance_stderr;
  result.balance_within_3se = within(bal, bal_se);
  result.pass = result.pass && result.balance_within_3se;
  const double bal_z = bal_se > 0.0 ? bal / bal_se : 0.0;
  csv += "activation_balance," + format_double(bal) + ',' + format_double(bal_se) + ",0," +
         format_double(bal_z) + ',' + (result.balance_within_3se ? "true" : "false") + '\n';

  Json report;
  report["z"] = {config.validate_z.a1, config.validate_z.a2, config.validate_z.a4};
  report["horizon"] = config.validate_horizon;
  report["burn_in"] = config.validate_burn_in;
  report["batches"] = result.stats.batches;
  report["activation_scale"] = config.validate_activation_scale;
  report["jumps"] = traj.jumps;
  report["species"] = species;
  report["activation_balance"] = {{"residual", bal}, {"standard_error", bal_se},
                                  {"z_score", bal_z}, {"within_3se", result.balance_within_3se}};
  report["pass"] = result.pass;
  write_file(config.output_dir / "validate_averaging.json", dump(report));
  print_table(out, config.format, report, csv);
  return result;
}

EstimateResult cmd_estimate(const ExperimentConfig& config, std::ostream& out) {
  const auto& est = config.estimate;
  const std::size_t intervals = est.options.loss.grid_intervals;
  const double horizon = config.model.horizon;
  Dataset data;
  double j1 = config.model.j1_or_default();
  double j2 = config.model.j2_or_default();
  std::string source;

  if (est.data == DataSource::kSsa) {
    source = "ssa";
    const State x0 = config.model.initial_state();
    const ScalingRegime regime(config.model.n);
    const auto totals = conservation_totals(x0);
    j1 = static_cast<double>(totals.j1);
    j2 = static_cast<double>(totals.j2);
    RecordingOptions rec;
    rec.mode = RecordingMode::kGrid;
    rec.dt = horizon / static_cast<double>(intervals);
    data = scaled_slow_view(
        simulate(x0, config.model.kappa, regime, horizon, derive_seed(config.seed, 1), rec), regime);
  } else if (est.data == DataSource::kOde) {
    source = "ode";
    const EffectiveParams truth = model_theta(config.model.kappa, j1, j2);
    const OdeSolution sol = solve_reduced(truth, config.model.z0, horizon);
    OdeSolution::Cursor cursor(sol);
    data.times = uniform_grid(horizon, intervals);
    for (double t : data.times) {
      const auto z = cursor(t);
      data.a1.push_back(z[0]);
      data.a2.push_back(z[1]);
    }
    data.a4_initial = config.model.z0.a4;
    data.horizon = horizon;
    data.n = config.model.n;
  } else {
    source = "file:" + est.data_file;
    const TrajectoryTable table = parse_trajectory_csv(read_file(est.data_file));
    if (table.times.empty()) throw ConfigError("estimate.data_file", "trajectory file is empty");
    if (table.times.back() > horizon) {
      throw ConfigError("model.T", "shorter than the trajectory in estimate.data_file");
    }
    Trajectory traj;
    traj.times = table.times;
    traj.states = table.states;
    traj.initial = table.states.front();
    traj.final_state = table.states.back();
    traj.horizon = horizon;
    traj.n = config.model.n;
    const auto totals = conservation_totals(traj.initial);
    j1 = static_cast<double>(totals.j1);
    j2 = static_cast<double>(totals.j2);
    data = scaled_slow_view(traj, ScalingRegime(config.model.n));
  }

  EstimateResult result;
  result.theta_true = model_theta(config.model.kappa, j1, j2).values();
  EstimationOptions options = est.options;
  options.jobs = config.jobs;
  result.estimation = multistart_estimate(data, est.box, est.m,
                                          derive_seed(config.seed, kEstimateStartsStream), options);
  result.row = summarize(result.estimation, result.theta_true, source);

  Json report;
  report["data"] = source;
  report["n"] = config.model.n;
  report["horizon"] = horizon;
  report["grid_intervals"] = intervals;
  report["m"] = result.estimation.m;
  report["m_prime"] = result.estimation.m_prime;
  report["theta_true"] = theta_json(result.theta_true);
  report["theta_best"] = theta_json(result.estimation.theta_best);
  report["loss_best"] = result.estimation.loss_best;
  report["relative_sd"] = result.estimation.relative_sd ? theta_json(*result.estimation.relative_sd) : Json();
  report["relative_error"] = result.row.relative_error ? Json(*result.row.relative_error) : Json();
  Json box = Json::object();
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    box[std::string(EffectiveParams::name(i))] = {est.box[i].lo, est.box[i].hi};
  }
  report["box"] = box;
  Json starts = Json::array();
  for (const auto& s : result.estimation.starts) {
    starts.push_back({{"start", s.start}, {"theta", s.theta}, {"loss", s.loss},
                      {"iterations", s.iterations}, {"optimizer_converged", s.optimizer_converged},
                      {"converged", s.converged}});
  }
  report["starts"] = starts;
  const std::string csv = report_csv_header() + report_csv_row(result.row);
  write_file(config.output_dir / "estimate.json", dump(report));
  write_file(config.output_dir / "estimate.csv", csv);

  Json brief = report;
  brief.erase("starts");
  print_table(out, config.format, brief, csv);
  return result;
}

IdentifyResult cmd_identify(const ExperimentConfig& config, std::ostream& out) {
  const EffectiveParams theta =
      model_theta(config.model.kappa, config.model.j1_or_default(), config.model.j2_or_default());
  const OdeSolution sol = solve_reduced(theta, config.model.z0, config.model.horizon);
  IdentifyResult result;
  result.points = select_points(sol, config.identify_strategy,
                                derive_seed(config.seed, kIdentifyStream), config.identify_selection);
  result.report = identifiability_check(result.points, config.identify_tol_cond);
  const auto& rep = result.report;

  Json points = Json::array();
  for (const auto& p : result.points.points) points.push_back({{"t", p.t}, {"z_A1", p.a1}, {"z_A2", p.a2}});
  auto finite_or_null = [](double v) { return std::isfinite(v) ? Json(v) : Json(); };
  Json report;
  report["strategy"] = std::string(strategy_name(config.identify_strategy));
  report["theta"] = theta_json(theta.values());
  report["z_A4"] = result.points.a4;
  report["points"] = points;
  report["determinant"] = rep.determinant;
  report["condition"] = finite_or_null(rep.condition);
  report["sigma_min"] = rep.sigma_min;
  report["sigma_max"] = rep.sigma_max;
  report["tol_cond"] = config.identify_tol_cond;
  report["invertible"] = rep.invertible;
  report["all_z_A1_positive"] = rep.all_a1_positive;
  report["distinct_positive_z_A2"] = rep.distinct_positive_a2;
  report["contains_origin"] = rep.contains_origin;
  write_file(config.output_dir / "identify.json", dump(report));

  const std::string csv =
      "determinant,condition,invertible,all_z_A1_positive,distinct_positive_z_A2\n" +
      format_double(rep.determinant) + ',' + format_double(rep.condition) + ',' +
      (rep.invertible ? "true" : "false") + ',' + (rep.all_a1_positive ? "true" : "false") + ',' +
      (rep.distinct_positive_a2 ? "true" : "false") + '\n';
  print_table(out, config.format, report, csv);
  return result;
}

EffectiveParams cmd_map_params(const ExperimentConfig& config, std::ostream& out) {
  if (!config.model.j1) throw ConfigError("model.J1", "required key J1 is missing");
  if (!config.model.j2) throw ConfigError("model.J2", "required key J2 is missing");
  const EffectiveParams theta = model_theta(config.model.kappa, *config.model.j1, *config.model.j2);
  const Json j = theta_json(theta.values());
  std::string csv;
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    csv += std::string(i ? "," : "") + std::string(EffectiveParams::name(i));
  }
  csv += '\n';
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    csv += std::string(i ? "," : "") + format_double(theta[i]);
  }
  csv += '\n';
  write_file(config.output_dir / "theta.json", dump(j));
  write_file(config.output_dir / "theta.csv", csv);
  print_table(out, config.format, j, csv);
  return theta;
}

int run_command(std::string_view name, const ExperimentConfig& config, std::ostream& out,
                std::ostream& err) {
  try {
    if (name == "simulate") cmd_simulate(config, out);
    else if (name == "compare") cmd_compare(config, out);
    else if (name == "validate-averaging") cmd_validate_averaging(config, out);
    else if (name == "estimate") cmd_estimate(config, out);
    else if (name == "identify") cmd_identify(config, out);
    else if (name == "map-params") cmd_map_params(config, out);
    else {
      err << "unknown command: " << name << '\n';
      return kExitConfig;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid value: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IntegrationError& e) {
    err << "numerical failure: " << e.what() << " (last good t = " << e.last_good_time() << ")\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace glyco
