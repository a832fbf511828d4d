// The reduced two-variable model of the slow species: right-hand side,
// adaptive integrator with dense output, closed-form stationary means of the
// frozen fast subsystem and the averaged intensities built from them.
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "glyco/network.hpp"
#include "glyco/ssa.hpp"

namespace glyco {

inline constexpr double kDefaultA4Floor = 1e-6;

/// Raised when the adaptive integrator cannot continue.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double last_good_time)
      : std::runtime_error(what), last_good_time_(last_good_time) {}
  double last_good_time() const { return last_good_time_; }

 private:
  double last_good_time_;
};

/// Raised for the activation reactions, whose individual averaged intensities
/// need mixed moments that have no closed form.
class UnsupportedReaction : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// f(z) = [J1. K1 z1 z4 / (K_M1 + z1) + J1* z1 z2^2 / (K*_M1 + z1)] / (K1 z4 + z2^2).
/// z1, z2 are clamped at zero.
double f_theta(const EffectiveParams& theta, const SlowState& z);

/// g(z2) = J2. z2 / (K_M2 + z2), z2 clamped at zero.
double g_theta(const EffectiveParams& theta, double z_a2);

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  std::size_t max_steps = 200000;
};

struct OdeStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Dense solution of the reduced ODE on [0, T]: accepted mesh points with
/// values and slopes, evaluated by cubic Hermite interpolation. Z_A4 is stored,
/// never integrated.
class OdeSolution {
 public:
  OdeSolution(EffectiveParams theta, double a4, OdeOptions options)
      : theta_(theta), a4_(a4), options_(options) {}

  std::array<double, 2> operator()(double t) const;
  double a4() const { return a4_; }
  double horizon() const { return t_.empty() ? 0.0 : t_.back(); }
  const EffectiveParams& theta() const { return theta_; }
  const OdeOptions& options() const { return options_; }
  const OdeStats& stats() const { return stats_; }
  const std::vector<double>& mesh() const { return t_; }

  /// Evaluation for nondecreasing query times without a binary search.
  class Cursor {
   public:
    explicit Cursor(const OdeSolution& sol) : sol_(&sol) {}
    std::array<double, 2> operator()(double t);

   private:
    const OdeSolution* sol_;
    std::size_t segment_ = 0;
  };

 private:
  friend OdeSolution solve_reduced(const EffectiveParams&, const SlowState&, double,
                                   const OdeOptions&);
  std::array<double, 2> hermite(std::size_t seg, double t) const;

  EffectiveParams theta_;
  double a4_;
  OdeOptions options_;
  OdeStats stats_;
  std::vector<double> t_;
  std::vector<std::array<double, 2>> y_;
  std::vector<std::array<double, 2>> dy_;
};

/// Dormand-Prince 5(4) with local error control. dZ_A1/dt = k0 - f,
/// dZ_A2/dt = f - g, Z_A4 = z0.a4. Throws IntegrationError on step-size
/// underflow, step-count exhaustion, or a negative excursion beyond 10 atol.
OdeSolution solve_reduced(const EffectiveParams& theta, const SlowState& z0, double horizon,
                          const OdeOptions& options = {});

/// Stationary means of the frozen fast subsystem, ordered
/// (A3, E1, E1*, E1A1, E1*A1, E2, E2A2).
std::array<double, kNumFast> stationary_means(const RateConstants& kappa, double j1, double j2,
                                              const SlowState& z);

/// lambda-bar_k(z): propensity with fast coordinates replaced by their
/// stationary means (lambda-bar_8 = k8 z_A2^2).
double averaged_intensity(Reaction k, const RateConstants& kappa, double j1, double j2,
                          const SlowState& z);

struct DriftResiduals {
  double a1;
  double a2;
};

/// Compares the averaged-intensity drift with (k0 - f, f - g). theta must be
/// effective_params(kappa, j1, j2) (checked to 1e-12 relative).
DriftResiduals drift_identity_check(const EffectiveParams& theta, const RateConstants& kappa,
                                    double j1, double j2, const SlowState& z);

}  // namespace glyco
