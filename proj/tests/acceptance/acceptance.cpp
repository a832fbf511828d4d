// Acceptance runner: one PASS/FAIL line per criterion. With an argument, runs
// only that criterion; the exit status is nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "glyco/commands.hpp"
#include "glyco/io.hpp"
#include "glyco/rng.hpp"

using namespace glyco;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

const Vec8 kReferenceTheta{0.5, 3.0, 2.0, 1.0, 2.0, 0.3, 2.0, 1.5};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::path("acceptance_out") / name;
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig base_config(const fs::path& dir) {
  ExperimentConfig c;
  c.model.j1 = 5.0;
  c.model.j2 = 5.0;
  c.output_dir = dir;
  c.jobs = std::max(1u, std::thread::hardware_concurrency());
  return c;
}

Outcome effective_map() {
  std::ostringstream sink;
  const EffectiveParams theta = cmd_map_params(base_config(workdir("1")), sink);
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    worst = std::max(worst, std::abs(theta[i] - kReferenceTheta[i]));
  }
  return {worst <= 5e-3, "max abs error " + fmt(worst) + " (limit 5e-3)"};
}

Outcome conservation() {
  const ExperimentConfig c = base_config(workdir("2"));
  const State x0 = c.model.initial_state();
  const ConservationTotals expected = conservation_totals(x0);
  RecordingOptions rec;
  rec.mode = RecordingMode::kAllJumps;
  std::uint64_t states = 0;
  for (std::uint64_t r = 1; r <= 10; ++r) {
    const Trajectory traj = simulate(x0, c.model.kappa, ScalingRegime(100), 20.0, derive_seed(c.seed, r), rec);
    for (const auto& x : traj.states) {
      ++states;
      if (conservation_totals(x) != expected) {
        return {false, "totals changed in replicate " + std::to_string(r)};
      }
    }
  }
  return {true, std::to_string(states) + " recorded states over 10 paths, totals constant"};
}

Outcome averaging() {
  ExperimentConfig c = base_config(workdir("3"));
  std::ostringstream sink;
  const ValidateResult r = cmd_validate_averaging(c, sink);
  double worst = 0.0;
  for (std::size_t i = 0; i < kNumFast; ++i) {
    const double se = r.stats.standard_error[i];
    if (se > 0.0) worst = std::max(worst, std::abs(r.stats.mean[i] - r.closed_form[i]) / se);
  }
  const double bal = r.stats.activation_balance_stderr > 0.0
                         ? std::abs(r.stats.activation_balance) / r.stats.activation_balance_stderr
                         : 0.0;
  return {r.pass && c.validate_horizon >= 1e4,
          "T = " + fmt(c.validate_horizon) + ", max |z| means " + fmt(worst) + ", balance |z| " + fmt(bal) +
              " (limit 3)"};
}

Outcome drift() {
  const RateConstants kappa = RateConstants::reference();
  const EffectiveParams theta = effective_params(kappa, 5.0, 5.0);
  Rng rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const SlowState z{3.0 * rng.uniform(), 3.0 * rng.uniform(), 0.5 + 1.5 * rng.uniform()};
    const DriftResiduals d = drift_identity_check(theta, kappa, 5.0, 5.0, z);
    worst = std::max({worst, std::abs(d.a1), std::abs(d.a2)});
  }
  return {worst <= 1e-10, "max residual " + fmt(worst) + " over 1000 points (limit 1e-10)"};
}

Outcome convergence() {
  std::map<std::int64_t, double> median;
  for (std::int64_t n : {100, 10000}) {
    ExperimentConfig c = base_config(workdir("5/n" + std::to_string(n)));
    c.model.n = n;
    c.compare_replicates = 5;
    std::ostringstream sink;
    median[n] = cmd_compare(c, sink).median_sup_a2;
  }
  const bool pass = median[10000] < median[100] && median[10000] <= 0.1;
  return {pass, "median sup |z_A2 - Z_A2|: n=1e2 " + fmt(median[100]) + ", n=1e4 " + fmt(median[10000]) +
                    " (limit 0.1)"};
}

Outcome self_recovery() {
  ExperimentConfig c = base_config(workdir("6"));
  c.estimate.data = DataSource::kOde;
  c.estimate.m = 50;
  std::ostringstream sink;
  const EstimateResult r = cmd_estimate(c, sink);
  const double err = relative_error(r.estimation.theta_best, kReferenceTheta);
  return {err <= 5.0 && r.estimation.loss_best <= 1e-6,
          "relative error " + fmt(err) + "% (limit 5), loss_best " + fmt(r.estimation.loss_best) +
              " (limit 1e-6), m' = " + std::to_string(r.estimation.m_prime)};
}

Outcome stochastic_recovery(std::int64_t n, double limit) {
  ExperimentConfig c = base_config(workdir("7/n" + std::to_string(n)));
  c.model.n = n;
  c.estimate.data = DataSource::kSsa;
  c.estimate.m = 200;
  std::ostringstream sink;
  const EstimateResult r = cmd_estimate(c, sink);
  const double err = *r.row.relative_error;
  return {err <= limit, "n=" + std::to_string(n) + ", T=" + fmt(c.model.horizon) + ", m=200: relative error " +
                            fmt(err) + "% (limit " + fmt(limit) + "), m' = " +
                            std::to_string(r.estimation.m_prime) + ", loss_best " +
                            fmt(r.estimation.loss_best)};
}

Outcome identifiability() {
  std::ostringstream sink;
  const IdentifyResult r = cmd_identify(base_config(workdir("8")), sink);
  OrbitPoints same;
  for (auto& p : same.points) p = r.points.points[0];
  const IdentifiabilityReport degenerate = identifiability_check(same);
  const bool pass = r.report.invertible && r.report.condition <= 1e12 && degenerate.determinant == 0.0 &&
                    !degenerate.invertible;
  return {pass, "equitime condition " + fmt(r.report.condition) + " (limit 1e12); identical points det " +
                    fmt(degenerate.determinant) + ", invertible " + (degenerate.invertible ? "true" : "false")};
}

Outcome optimizer_suite() {
  std::array<Interval, 8> unit;
  unit.fill(Interval{0.0, 1.0});
  const Box8 box(unit);
  Vec8 x0;
  x0.fill(0.5);
  std::vector<std::string> failures;

  Vec8 inner{0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9};
  auto bowl = [](const Vec8& c) {
    return [c](const Vec8& x) {
      double v = 0.0;
      for (std::size_t i = 0; i < 8; ++i) v += (x[i] - c[i]) * (x[i] - c[i]);
      return v;
    };
  };
  NelderMeadOptions tight;
  tight.x_tol = 1e-10;
  tight.f_tol = 1e-20;
  tight.max_iters = 20000;
  auto dist = [](const Vec8& a, const Vec8& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < 8; ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
  };
  const auto r1 = nelder_mead<8>(bowl(inner), x0, box, tight);
  if (dist(r1.x, inner) > 1e-6) failures.push_back("interior bowl off by " + fmt(dist(r1.x, inner)));

  const Vec8 outer{1.5, -0.5, 0.3, 2.0, 0.7, -1.0, 0.5, 1.2};
  const auto r2 = nelder_mead<8>(bowl(outer), x0, box, tight);
  if (dist(r2.x, box.project(outer)) > 1e-4) failures.push_back("exterior bowl off by " + fmt(dist(r2.x, box.project(outer))));

  std::array<Interval, 8> wide;
  wide.fill(Interval{-2.0, 2.0});
  auto rosen = [](const Vec8& x) {
    double v = 100.0 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1.0 - x[0]) * (1.0 - x[0]);
    for (std::size_t i = 2; i < 8; ++i) v += (x[i] - 1.0) * (x[i] - 1.0);
    return v;
  };
  NelderMeadOptions budget;
  budget.max_iters = 5000;
  const auto r3 = nelder_mead<8>(rosen, x0, Box8(wide), budget);
  if (!(r3.f <= 1e-4 && r3.iterations <= 5000)) failures.push_back("rosenbrock f = " + fmt(r3.f));

  const ParamBox pbox = ParamBox::reference();
  for (std::size_t m : {1u, 8u, 64u}) {
    const auto pts = latin_hypercube(m, pbox, 17);
    for (std::size_t i = 0; i < 8; ++i) {
      std::vector<bool> hit(m, false);
      for (const auto& p : pts) {
        const double u = (p[i] - pbox[i].lo) / (pbox[i].hi - pbox[i].lo);
        hit[std::min(static_cast<std::size_t>(u * static_cast<double>(m)), m - 1)] = true;
      }
      if (std::count(hit.begin(), hit.end(), true) != static_cast<long>(m)) {
        failures.push_back("LHS m=" + std::to_string(m) + " coordinate " + std::to_string(i));
      }
    }
  }
  std::string detail = "interior " + fmt(dist(r1.x, inner)) + ", exterior " +
                       fmt(dist(r2.x, box.project(outer))) + ", rosenbrock f " + fmt(r3.f) + " in " +
                       std::to_string(r3.iterations) + " iterations, LHS m in {1,8,64}";
  for (const auto& f : failures) detail += "; " + f;
  return {failures.empty(), detail};
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

Outcome determinism() {
  const fs::path root = workdir("10");
  fs::create_directories(root);
  // Short horizons keep every command at desk speed; all code paths still run.
  write_file(root / "run.cfg",
             "model.J1 = 5\nmodel.J2 = 5\nmodel.T = 2\nsimulate.replicates = 4\ncompare.replicates = 4\n"
             "validate.T = 500\nestimate.m = 8\nestimate.grid_intervals = 200\nestimate.max_iters = 300\n"
             "identify.strategy = greedy\nidentify.candidates = 50\n");
  std::vector<std::string> mismatched;
  std::size_t files = 0;
  for (const char* name : {"simulate", "compare", "validate-averaging", "estimate", "identify", "map-params"}) {
    std::map<std::string, std::string> first;
    int run = 0;
    for (const char* jobs : {"1", "8", "1", "8"}) {
      const fs::path out = root / (std::string(name) + "_" + std::to_string(run++));
      const std::string cmd = std::string(GLYCO_CLI_PATH) + " " + name + " --config " + (root / "run.cfg").string() +
                              " --seed 7 --jobs " + jobs + " --out " + out.string() + " > " +
                              (out.string() + ".stdout") + " 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, std::string(name) + " exited nonzero"};
      auto snap = snapshot(out);
      snap["<stdout>"] = read_file(out.string() + ".stdout");
      if (first.empty()) {
        first = snap;
        files += snap.size();
      } else if (snap != first) {
        mismatched.push_back(std::string(name) + " (jobs " + jobs + ")");
      }
    }
  }
  std::string detail = "6 commands x 4 runs (jobs 1, 8, 1, 8), " + std::to_string(files) + " artifacts compared";
  for (const auto& m : mismatched) detail += "; differs: " + m;
  return {mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1", effective_map},
      {"2", conservation},
      {"3", averaging},
      {"4", drift},
      {"5", convergence},
      {"6", self_recovery},
      {"7a", [] { return stochastic_recovery(1000, 45.0); }},
      {"7b", [] { return stochastic_recovery(10000, 15.0); }},
      {"8", identifiability},
      {"9", optimizer_suite},
      {"10", determinism},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  bool all_pass = true;
  bool matched = false;
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && id != only) continue;
    matched = true;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  ["
              << fmt(secs) << " s]" << std::endl;
    all_pass = all_pass && o.pass;
  }
  if (!matched) {
    std::cerr << "unknown criterion: " << only << '\n';
    return 2;
  }
  return all_pass ? 0 : 1;
}
