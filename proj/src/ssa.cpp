#include "glyco/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "glyco/rng.hpp"

namespace glyco {

namespace {

bool changes_slow(const std::array<int, kNumSpecies>& nu) {
  return nu[idx(Species::A1)] != 0 || nu[idx(Species::A2)] != 0 || nu[idx(Species::A4)] != 0;
}

void validate_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("simulation horizon T must be positive and finite");
  }
}

}  // namespace

Trajectory simulate(const State& x0, const RateConstants& kappa, const ScalingRegime& regime,
                    double horizon, std::uint64_t seed, const RecordingOptions& recording) {
  return simulate(x0, kappa.values(), regime, horizon, seed, recording);
}

Trajectory simulate(const State& x0, const RateTable& kappa, const ScalingRegime& regime,
                    double horizon, std::uint64_t seed, const RecordingOptions& recording) {
  validate_horizon(horizon);
  for (auto v : x0) {
    if (v < 0) throw DomainError("initial state has a negative count");
  }
  for (double k : kappa) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("rate constants must be >= 0");
  }
  if (recording.mode == RecordingMode::kEveryNth && recording.every == 0) {
    throw DomainError("recording.every must be >= 1");
  }
  if (recording.mode == RecordingMode::kGrid && !(recording.dt > 0.0)) {
    throw DomainError("recording.dt must be positive");
  }

  const Network& net = build_network();
  const RateTable rates = unscaled_rates(kappa, regime);
  std::array<bool, kNumReactions> slow{};
  for (std::size_t k = 0; k < kNumReactions; ++k) slow[k] = changes_slow(net.nu[k]);

  Trajectory out;
  out.initial = x0;
  out.horizon = horizon;
  out.seed = seed;
  out.n = regime.n();
  out.recording = recording;

  Rng rng(seed);
  State x = x0;
  double t = 0.0;

  // Grid recording bookkeeping.
  std::uint64_t grid_next = 0;
  const std::uint64_t grid_last =
      recording.mode == RecordingMode::kGrid
          ? static_cast<std::uint64_t>(std::floor(horizon / recording.dt * (1.0 + 1e-12)))
          : 0;
  auto flush_grid = [&](double until, bool inclusive) {
    while (grid_next <= grid_last) {
      const double tg = static_cast<double>(grid_next) * recording.dt;
      if (inclusive ? tg > until : tg >= until) break;
      out.times.push_back(std::min(tg, horizon));
      out.states.push_back(x);
      ++grid_next;
    }
  };

  if (recording.mode == RecordingMode::kGrid) {
    out.times.reserve(grid_last + 1);
    out.states.reserve(grid_last + 1);
  } else {
    out.times.push_back(0.0);
    out.states.push_back(x);
  }

  std::array<double, kNumReactions> a{};
  while (true) {
    double total = 0.0;
    for (std::size_t k = 0; k < kNumReactions; ++k) {
      a[k] = propensity(x, static_cast<Reaction>(k), rates);
      total += a[k];
    }
    if (!(total > 0.0)) break;  // absorbed
    const double tau = rng.exponential(total);
    const double target = rng.uniform() * total;
    if (t + tau > horizon) break;

    std::size_t chosen = kNumReactions;
    double acc = 0.0;
    for (std::size_t k = 0; k < kNumReactions; ++k) {
      acc += a[k];
      if (target < acc) {
        chosen = k;
        break;
      }
    }
    if (chosen == kNumReactions) {
      // Rounding left target >= acc; take the last reaction with positive propensity.
      for (std::size_t k = kNumReactions; k-- > 0;) {
        if (a[k] > 0.0) {
          chosen = k;
          break;
        }
      }
    }

    const double t_new = t + tau;
    if (recording.mode == RecordingMode::kGrid) flush_grid(t_new, false);

    const auto& nu = net.nu[chosen];
    for (std::size_t i = 0; i < kNumSpecies; ++i) x[i] += nu[i];
    t = t_new;
    ++out.reaction_counts[chosen];
    ++out.jumps;

    switch (recording.mode) {
      case RecordingMode::kAllJumps:
        out.times.push_back(t);
        out.states.push_back(x);
        break;
      case RecordingMode::kSlowChanges:
        if (slow[chosen]) {
          out.times.push_back(t);
          out.states.push_back(x);
        }
        break;
      case RecordingMode::kEveryNth:
        if (out.jumps % recording.every == 0) {
          out.times.push_back(t);
          out.states.push_back(x);
        }
        break;
      case RecordingMode::kGrid:
        break;
    }
  }
  if (recording.mode == RecordingMode::kGrid) flush_grid(horizon, true);
  out.final_state = x;
  return out;
}

FastTrajectory simulate_frozen_fast(const SlowState& zs, const FastState& zf0,
                                    const RateTable& kappa, double horizon, std::uint64_t seed,
                                    const FrozenFastOptions& options) {
  validate_horizon(horizon);
  if (!(zs.a4 > 0.0)) throw DomainError("frozen z_A4 must be positive");
  if (zs.a1 < 0.0 || zs.a2 < 0.0) throw DomainError("frozen z_A1, z_A2 must be nonnegative");
  if (!(options.activation_scale >= 0.0)) throw DomainError("activation_scale must be >= 0");
  for (auto v : zf0) {
    if (v < 0) throw DomainError("fast initial state has a negative count");
  }

  using namespace fast;
  const auto k = [&kappa](Rate r) { return kappa[idx(r)]; };
  const double eps = options.activation_scale;

  struct Channel {
    double coeff;
    int kind;  // 0 constant, 1 unary(a), 2 binary(a, b)
    std::size_t a, b;
    std::array<int, kNumFast> jump;
  };
  const std::array<Channel, 15> channels = {{
      {k(Rate::k1) * zs.a1, 1, kE1, 0, {0, -1, 0, +1, 0, 0, 0}},
      {k(Rate::km1), 1, kE1A1, 0, {0, +1, 0, -1, 0, 0, 0}},
      {k(Rate::k2), 1, kE1A1, 0, {0, +1, 0, -1, 0, 0, 0}},
      {k(Rate::k3) * zs.a1, 1, kE1Star, 0, {0, 0, -1, 0, +1, 0, 0}},
      {k(Rate::km3), 1, kE1StarA1, 0, {0, 0, +1, 0, -1, 0, 0}},
      {k(Rate::k4), 1, kE1StarA1, 0, {0, 0, +1, 0, -1, 0, 0}},
      {k(Rate::k5) * zs.a2, 1, kE2, 0, {0, 0, 0, 0, 0, -1, +1}},
      {k(Rate::km5), 1, kE2A2, 0, {0, 0, 0, 0, 0, +1, -1}},
      {k(Rate::k6), 1, kE2A2, 0, {0, 0, 0, 0, 0, +1, -1}},
      {k(Rate::k8) * zs.a2 * zs.a2, 0, 0, 0, {+1, 0, 0, 0, 0, 0, 0}},
      {k(Rate::km8) * zs.a4, 1, kA3, 0, {-1, 0, 0, 0, 0, 0, 0}},
      {eps * k(Rate::k7), 2, kE1, kA3, {-1, -1, +1, 0, 0, 0, 0}},
      {eps * k(Rate::km7), 1, kE1Star, 0, {+1, +1, -1, 0, 0, 0, 0}},
      {eps * k(Rate::k7), 2, kE1A1, kA3, {-1, 0, 0, -1, +1, 0, 0}},
      {eps * k(Rate::km7), 1, kE1StarA1, 0, {+1, 0, 0, +1, -1, 0, 0}},
  }};

  FastTrajectory out;
  out.horizon = horizon;
  out.seed = seed;
  Rng rng(seed);
  FastState x = zf0;
  double t = 0.0;
  out.times.push_back(0.0);
  out.states.push_back(x);

  std::array<double, channels.size()> a{};
  while (true) {
    double total = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      const Channel& ch = channels[c];
      double v = ch.coeff;
      if (ch.kind >= 1) v *= static_cast<double>(x[ch.a]);
      if (ch.kind == 2) v *= static_cast<double>(x[ch.b]);
      a[c] = v;
      total += v;
    }
    if (!(total > 0.0)) break;
    const double tau = rng.exponential(total);
    const double target = rng.uniform() * total;
    if (t + tau > horizon) break;
    std::size_t chosen = channels.size();
    double acc = 0.0;
    for (std::size_t c = 0; c < channels.size(); ++c) {
      acc += a[c];
      if (target < acc) {
        chosen = c;
        break;
      }
    }
    if (chosen == channels.size()) {
      for (std::size_t c = channels.size(); c-- > 0;) {
        if (a[c] > 0.0) {
          chosen = c;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < kNumFast; ++i) x[i] += channels[chosen].jump[i];
    t += tau;
    ++out.jumps;
    out.times.push_back(t);
    out.states.push_back(x);
  }
  return out;
}

namespace {

// Integrates phi(state) over [lo, hi] split into `batches` equal sub-windows.
// Returns per-batch time averages.
template <typename Phi>
std::vector<double> batch_averages(const FastTrajectory& traj, double lo, double hi,
                                   std::size_t batches, Phi phi) {
  std::vector<double> integral(batches, 0.0);
  const double width = (hi - lo) / static_cast<double>(batches);
  const std::size_t m = traj.times.size();
  for (std::size_t j = 0; j < m; ++j) {
    double s0 = traj.times[j];
    const double s1 = j + 1 < m ? traj.times[j + 1] : traj.horizon;
    if (s1 <= lo || s0 >= hi) continue;
    s0 = std::max(s0, lo);
    const double end = std::min(s1, hi);
    const double value = phi(traj.states[j]);
    while (s0 < end) {
      auto b = static_cast<std::size_t>((s0 - lo) / width);
      if (b >= batches) b = batches - 1;
      const double bend = b + 1 == batches ? hi : lo + width * static_cast<double>(b + 1);
      const double piece = std::min(end, bend) - s0;
      integral[b] += value * piece;
      s0 = std::min(end, bend);
      if (piece <= 0.0) break;
    }
  }
  for (auto& v : integral) v /= width;
  return integral;
}

void validate_window(const FastTrajectory& traj, double burn_in) {
  if (traj.times.empty()) throw DomainError("empty trajectory");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw DomainError("burn_in must lie in [0, 1)");
  if (!(traj.horizon > 0.0)) throw DomainError("empty averaging window");
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

std::array<double, kNumFast> time_average_fast(const FastTrajectory& traj, double burn_in) {
  validate_window(traj, burn_in);
  const double lo = burn_in * traj.horizon;
  std::array<double, kNumFast> out{};
  for (std::size_t i = 0; i < kNumFast; ++i) {
    out[i] = batch_averages(traj, lo, traj.horizon, 1, [i](const FastState& s) {
      return static_cast<double>(s[i]);
    })[0];
  }
  return out;
}

FastAverageStats fast_average_stats(const FastTrajectory& traj, const RateTable& kappa,
                                    double burn_in, std::size_t batches) {
  validate_window(traj, burn_in);
  if (batches < 2) throw DomainError("need at least two batches for a standard error");
  using namespace fast;
  const double lo = burn_in * traj.horizon;
  FastAverageStats out;
  out.batches = batches;
  for (std::size_t i = 0; i < kNumFast; ++i) {
    auto [m, se] = mean_and_stderr(batch_averages(
        traj, lo, traj.horizon, batches, [i](const FastState& s) { return static_cast<double>(s[i]); }));
    out.mean[i] = m;
    out.standard_error[i] = se;
  }
  const double k7 = kappa[idx(Rate::k7)];
  const double km7 = kappa[idx(Rate::km7)];
  auto [bm, bse] = mean_and_stderr(
      batch_averages(traj, lo, traj.horizon, batches, [k7, km7](const FastState& s) {
        return k7 * static_cast<double>(s[kE1] + s[kE1A1]) * static_cast<double>(s[kA3]) -
               km7 * static_cast<double>(s[kE1Star] + s[kE1StarA1]);
      }));
  out.activation_balance = bm;
  out.activation_balance_stderr = bse;
  return out;
}

std::array<double, 2> Dataset::at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t j = it == times.begin() ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
  return {a1[j], a2[j]};
}

Dataset scaled_slow_view(const Trajectory& traj, const ScalingRegime& regime) {
  if (traj.states.empty()) throw DomainError("trajectory has no recorded states");
  Dataset d;
  const double n = static_cast<double>(regime.n());
  d.times = traj.times;
  d.a1.reserve(traj.states.size());
  d.a2.reserve(traj.states.size());
  for (const State& s : traj.states) {
    d.a1.push_back(static_cast<double>(s[idx(Species::A1)]) / n);
    d.a2.push_back(static_cast<double>(s[idx(Species::A2)]) / n);
  }
  d.a4_initial = static_cast<double>(traj.initial[idx(Species::A4)]) / (n * n);
  d.horizon = traj.horizon;
  d.n = regime.n();
  d.seed = traj.seed;
  return d;
}

}  // namespace glyco
