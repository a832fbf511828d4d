// Exact stochastic simulation (Gillespie direct method) of the full network and
// of the fast subsystem with the slow species frozen.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "glyco/network.hpp"

namespace glyco {

enum class RecordingMode {
  kAllJumps,     // every jump
  kSlowChanges,  // jumps that change A1, A2 or A4
  kEveryNth,     // every nth jump
  kGrid,         // state at t = 0, dt, 2 dt, ... <= T
};

struct RecordingOptions {
  RecordingMode mode = RecordingMode::kSlowChanges;
  std::uint64_t every = 1;  // kEveryNth
  double dt = 0.01;         // kGrid
};

/// A sample path. States are piecewise constant: states[j] holds on
/// [times[j], times[j+1]). Reaction counters are exact regardless of thinning.
struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  ReactionCounts reaction_counts{};
  State initial{};
  State final_state{};
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::int64_t n = 1;
  std::uint64_t jumps = 0;
  RecordingOptions recording;
};

/// SSA path of the full 10-species chain on [0, T] with propensities built from
/// unscaled_rates(kappa, regime). Deterministic in (x0, kappa, regime, T, seed).
Trajectory simulate(const State& x0, const RateConstants& kappa, const ScalingRegime& regime,
                    double horizon, std::uint64_t seed, const RecordingOptions& recording = {});

/// Same, but accepts a nonnegative rate table so individual reactions can be
/// switched off.
Trajectory simulate(const State& x0, const RateTable& kappa, const ScalingRegime& regime,
                    double horizon, std::uint64_t seed, const RecordingOptions& recording = {});

/// Frozen slow coordinates (z_A1, z_A2, z_A4), scaled.
struct SlowState {
  double a1 = 0.0;
  double a2 = 0.0;
  double a4 = 1.0;
};

/// Fast coordinates in the order (A3, E1, E1*, E1A1, E1*A1, E2, E2A2).
inline constexpr std::size_t kNumFast = 7;
using FastState = std::array<std::int64_t, kNumFast>;

namespace fast {
inline constexpr std::size_t kA3 = 0, kE1 = 1, kE1Star = 2, kE1A1 = 3, kE1StarA1 = 4, kE2 = 5,
                             kE2A2 = 6;
}

struct FastTrajectory {
  std::vector<double> times;
  std::vector<FastState> states;
  double horizon = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t jumps = 0;
};

struct FrozenFastOptions {
  /// Relative speed of the activation reactions (+-7, +-7'). Zero gives the
  /// pure frozen-slow generator, under which E1 + E1A1 never changes; the
  /// n-th chain runs them at n^{-1/2} of the fast clock.
  double activation_scale = 0.0;
};

/// SSA of the fast subsystem with z_S frozen; rates are the scaled kappa.
FastTrajectory simulate_frozen_fast(const SlowState& zs, const FastState& zf0,
                                    const RateTable& kappa, double horizon, std::uint64_t seed,
                                    const FrozenFastOptions& options = {});

/// Time-weighted mean of each fast coordinate over [burn_in * T, T].
std::array<double, kNumFast> time_average_fast(const FastTrajectory& traj, double burn_in = 0.5);

struct FastAverageStats {
  std::array<double, kNumFast> mean{};
  std::array<double, kNumFast> standard_error{};
  /// Time average of k7 (E1 + E1A1) A3 - km7 (E1* + E1*A1).
  double activation_balance = 0.0;
  double activation_balance_stderr = 0.0;
  std::size_t batches = 0;
};

/// Means with Monte-Carlo standard errors from non-overlapping batch means
/// over the post-burn-in window.
FastAverageStats fast_average_stats(const FastTrajectory& traj, const RateTable& kappa,
                                    double burn_in = 0.5, std::size_t batches = 50);

/// Observed slow data: piecewise-constant (z_A1, z_A2) plus z_A4(0).
struct Dataset {
  std::vector<double> times;
  std::vector<double> a1;
  std::vector<double> a2;
  double a4_initial = 1.0;
  double horizon = 0.0;
  std::int64_t n = 1;
  std::uint64_t seed = 0;

  /// Value at t in [0, T] (right-continuous).
  std::array<double, 2> at(double t) const;
  std::array<double, 2> initial() const { return {a1.front(), a2.front()}; }
};

Dataset scaled_slow_view(const Trajectory& traj, const ScalingRegime& regime);

}  // namespace glyco
