// Trajectory-mismatch estimation of the effective parameters: loss against the
// reduced model, box-projected Nelder-Mead, Latin-hypercube multi-start and
// the summary statistics reported per experiment.
#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "glyco/network.hpp"
#include "glyco/reduced.hpp"
#include "glyco/ssa.hpp"

namespace glyco {

struct Interval {
  double lo;
  double hi;
};

/// Closed box with strictly positive lower bounds when used for theta;
/// the optimizer itself only requires lo < hi.
template <std::size_t N>
class Box {
 public:
  explicit Box(const std::array<Interval, N>& bounds) : bounds_(bounds) {
    for (const auto& b : bounds_) {
      if (!(b.lo < b.hi)) throw DomainError("box interval requires lo < hi");
    }
  }
  const Interval& operator[](std::size_t i) const { return bounds_[i]; }
  const std::array<Interval, N>& bounds() const { return bounds_; }

  std::array<double, N> project(std::array<double, N> x) const {
    for (std::size_t i = 0; i < N; ++i) x[i] = std::clamp(x[i], bounds_[i].lo, bounds_[i].hi);
    return x;
  }
  bool contains(const std::array<double, N>& x) const {
    for (std::size_t i = 0; i < N; ++i) {
      if (!(x[i] >= bounds_[i].lo && x[i] <= bounds_[i].hi)) return false;
    }
    return true;
  }

 private:
  std::array<Interval, N> bounds_;
};

using Vec8 = std::array<double, kNumEffectiveParams>;
using Box8 = Box<kNumEffectiveParams>;

/// A box for theta; lower bounds must be strictly positive.
class ParamBox : public Box8 {
 public:
  explicit ParamBox(const std::array<Interval, kNumEffectiveParams>& bounds);
  /// The search intervals used with the reference rate set.
  static ParamBox reference();
};

struct LossOptions {
  std::size_t grid_intervals = 2000;
  OdeOptions ode;
  double penalty = 1e10;
};

struct LossValue {
  double value = 0.0;
  bool failed = false;  // ODE integration failed; value is the penalty
};

/// Composite trapezoid approximation of
/// int_0^T |z1(t) - Z1(t)|^2 + |z2(t) - Z2(t)|^2 dt, with Z solved from the
/// data's own initial point.
LossValue loss(const EffectiveParams& theta, const Dataset& data, const LossOptions& options = {});

/// Trapezoid rule for the same integrand against an arbitrary reference path.
double trapezoid_mismatch(const Dataset& data,
                          const std::function<std::array<double, 2>(double)>& reference,
                          std::size_t intervals);

/// m stratified points: per coordinate, one sample per equal-width bin.
template <std::size_t N>
std::vector<std::array<double, N>> latin_hypercube(std::size_t m, const Box<N>& box,
                                                   std::uint64_t seed);

struct NelderMeadOptions {
  double x_tol = 1e-6;   // relative simplex diameter
  double f_tol = 1e-10;  // spread of objective values over the simplex
  std::size_t max_iters = 5000;
  double initial_step = 0.05;  // relative perturbation for the initial simplex
  std::size_t max_restarts = 20;  // fresh simplices around the incumbent
};

template <std::size_t N>
struct NelderMeadResult {
  std::array<double, N> x;
  double f;
  std::size_t iterations;
  std::size_t evaluations;
  bool converged;
};

/// Nelder-Mead (reflection 1, expansion 2, contraction 0.5, shrink 0.5) with
/// each trial point projected onto the box before it is evaluated. After a
/// tolerance stop the simplex is rebuilt around the incumbent, until a restart
/// gains no more than f_tol; max_iters bounds the total over all restarts.
template <std::size_t N>
NelderMeadResult<N> nelder_mead(const std::function<double(const std::array<double, N>&)>& objective,
                                const std::array<double, N>& x0, const Box<N>& box,
                                const NelderMeadOptions& options = {});

struct StartOutcome {
  Vec8 start;
  Vec8 theta;
  double loss;
  std::size_t iterations;
  bool optimizer_converged;  // terminated on tolerance rather than max_iters
  bool converged;            // within 10% of the best loss
};

struct EstimationResult {
  Vec8 theta_best{};
  double loss_best = 0.0;
  std::vector<StartOutcome> starts;
  std::optional<Vec8> relative_sd;
  std::optional<double> relative_error;
  std::size_t m = 0;
  std::size_t m_prime = 0;
};

struct EstimationOptions {
  LossOptions loss;
  NelderMeadOptions nelder_mead;
  double convergence_ratio = 0.1;
  std::size_t jobs = 1;
};

/// Multi-start minimisation of an arbitrary objective over the box. The result
/// depends on (objective, box, m, seed, options) only, not on options.jobs.
EstimationResult multistart_minimize(const std::function<double(const Vec8&)>& objective,
                                     const Box8& box, std::size_t m, std::uint64_t seed,
                                     const EstimationOptions& options = {});

/// multistart_minimize applied to loss(., data).
EstimationResult multistart_estimate(const Dataset& data, const ParamBox& box, std::size_t m,
                                     std::uint64_t seed, const EstimationOptions& options = {});

/// Marks runs as converged (|L - L_best| / |L_best| <= ratio, or L <= f_tol
/// when L_best is zero) and fills m_prime and relative_sd.
void classify_and_summarize(EstimationResult& result, double ratio, double f_tol);

/// sigma_i / mean_i over the given estimates, with
/// sigma_i = sqrt(sum_j (theta_ji - mean_i)^2) / sqrt(m' - 1). Empty for m' < 2.
std::optional<Vec8> relative_sd(const std::vector<Vec8>& estimates);

/// ||theta_true - theta_hat||_1 / ||theta_true||_1 * 100.
double relative_error(const Vec8& theta_hat, const Vec8& theta_true);

struct ReportRow {
  std::string label;
  Vec8 estimate{};
  std::optional<Vec8> relative_sd;
  std::optional<double> relative_error;
  std::size_t m = 0;
  std::size_t m_prime = 0;
  double loss_best = 0.0;
};

ReportRow summarize(const EstimationResult& result, const std::optional<Vec8>& theta_true,
                    std::string label = "");

/// CSV header and row for the report (one row per experiment).
std::string report_csv_header();
std::string report_csv_row(const ReportRow& row);

}  // namespace glyco
