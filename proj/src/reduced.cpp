#include "glyco/reduced.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <string>
#include <utility>

namespace glyco {

double f_theta(const EffectiveParams& theta, const SlowState& z) {
  if (!(z.a4 > 0.0)) throw DomainError("f_theta requires z_A4 > 0");
  const double x = std::max(z.a1, 0.0);
  const double y2 = std::max(z.a2, 0.0) * std::max(z.a2, 0.0);
  const double k1z4 = theta.k1() * z.a4;
  const double num = theta.j1_bullet() * k1z4 * x / (theta.km1() + x) +
                     theta.j1_star() * x * y2 / (theta.km1_star() + x);
  return num / (k1z4 + y2);
}

double g_theta(const EffectiveParams& theta, double z_a2) {
  const double y = std::max(z_a2, 0.0);
  return theta.j2_bullet() * y / (theta.km2() + y);
}

namespace {

struct Rhs {
  const EffectiveParams& theta;
  double a4;
  std::size_t* counter;

  std::array<double, 2> operator()(const std::array<double, 2>& y) const {
    ++*counter;
    const double f = f_theta(theta, SlowState{y[0], y[1], a4});
    return {theta.kappa0() - f, f - g_theta(theta, y[1])};
  }
};

double scaled_norm(const std::array<double, 2>& v, const std::array<double, 2>& scale) {
  const double a = v[0] / scale[0];
  const double b = v[1] / scale[1];
  return std::sqrt(0.5 * (a * a + b * b));
}

}  // namespace

std::array<double, 2> OdeSolution::hermite(std::size_t seg, double t) const {
  const double t0 = t_[seg];
  const double h = t_[seg + 1] - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  std::array<double, 2> out{};
  for (std::size_t i = 0; i < 2; ++i) {
    out[i] = h00 * y_[seg][i] + h10 * h * dy_[seg][i] + h01 * y_[seg + 1][i] +
             h11 * h * dy_[seg + 1][i];
  }
  return out;
}

std::array<double, 2> OdeSolution::operator()(double t) const {
  if (t_.size() == 1 || t <= t_.front()) return y_.front();
  if (t >= t_.back()) return y_.back();
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  return hermite(static_cast<std::size_t>(it - t_.begin()) - 1, t);
}

std::array<double, 2> OdeSolution::Cursor::operator()(double t) {
  const auto& ts = sol_->t_;
  if (ts.size() == 1 || t <= ts.front()) return sol_->y_.front();
  if (t >= ts.back()) return sol_->y_.back();
  if (t < ts[segment_]) segment_ = 0;
  while (segment_ + 2 < ts.size() && ts[segment_ + 1] <= t) ++segment_;
  return sol_->hermite(segment_, t);
}

OdeSolution solve_reduced(const EffectiveParams& theta, const SlowState& z0, double horizon,
                          const OdeOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("ODE horizon must be positive");
  if (!(z0.a4 > 0.0)) throw DomainError("z_A4(0) must be positive");
  if (z0.a1 < 0.0 || z0.a2 < 0.0) throw DomainError("initial z_A1, z_A2 must be nonnegative");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw DomainError("tolerances must be positive");

  // Dormand-Prince 5(4) coefficients.
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  OdeSolution sol(theta, z0.a4, options);
  Rhs rhs{theta, z0.a4, &sol.stats_.rhs_evaluations};
  const double rtol = options.rtol;
  const double atol = options.atol;
  const double negative_floor = -10.0 * atol;

  std::array<double, 2> y{z0.a1, z0.a2};
  std::array<double, 2> k1 = rhs(y);
  double t = 0.0;
  sol.t_.push_back(t);
  sol.y_.push_back(y);
  sol.dy_.push_back(k1);

  auto axpy = [](const std::array<double, 2>& base, std::initializer_list<std::pair<double, const std::array<double, 2>*>> terms, double h) {
    std::array<double, 2> out = base;
    for (const auto& [c, k] : terms) {
      out[0] += h * c * (*k)[0];
      out[1] += h * c * (*k)[1];
    }
    return out;
  };

  // Initial step size (Hairer, Norsett & Wanner, II.4).
  double h;
  {
    const std::array<double, 2> sc{atol + rtol * std::abs(y[0]), atol + rtol * std::abs(y[1])};
    const double d0 = scaled_norm(y, sc);
    const double d1 = scaled_norm(k1, sc);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, horizon);
    const std::array<double, 2> y1{y[0] + h0 * k1[0], y[1] + h0 * k1[1]};
    const std::array<double, 2> f1 = rhs(y1);
    const std::array<double, 2> diff{f1[0] - k1[0], f1[1] - k1[1]};
    const double d2 = scaled_norm(diff, sc) / h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 1.0 / 5.0);
    h = std::min({100.0 * h0, h1, horizon});
  }

  std::size_t attempts = 0;
  while (t < horizon) {
    if (++attempts > options.max_steps) {
      throw IntegrationError("ODE step budget exhausted", t);
    }
    bool last = false;
    if (t + h >= horizon) {
      h = horizon - t;
      last = true;
    }
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw IntegrationError("ODE step size underflow", t);
    }
    const auto k2 = rhs(axpy(y, {{a21, &k1}}, h));
    const auto k3 = rhs(axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    const auto k4 = rhs(axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const auto k5 = rhs(axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const auto k6 = rhs(axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const auto y_new = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const auto k7 = rhs(y_new);
    std::array<double, 2> err{};
    for (std::size_t i = 0; i < 2; ++i) {
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    }
    const std::array<double, 2> sc{atol + rtol * std::max(std::abs(y[0]), std::abs(y_new[0])),
                                   atol + rtol * std::max(std::abs(y[1]), std::abs(y_new[1]))};
    const double en = scaled_norm(err, sc);
    const bool finite = std::isfinite(en) && std::isfinite(y_new[0]) && std::isfinite(y_new[1]);
    const bool nonneg = y_new[0] >= negative_floor && y_new[1] >= negative_floor;

    if (finite && en <= 1.0 && nonneg) {
      t = last ? horizon : t + h;
      y = {std::max(y_new[0], 0.0), std::max(y_new[1], 0.0)};
      k1 = k7;
      sol.t_.push_back(t);
      sol.y_.push_back(y);
      sol.dy_.push_back(k1);
      ++sol.stats_.steps;
      const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
      h *= fac;
    } else {
      ++sol.stats_.rejected;
      const double fac = finite && nonneg ? std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9) : 0.25;
      h *= fac;
    }
  }
  return sol;
}

std::array<double, kNumFast> stationary_means(const RateConstants& kappa, double j1, double j2,
                                              const SlowState& z) {
  if (!(z.a4 > 0.0)) throw DomainError("stationary_means requires z_A4 > 0");
  const auto k = [&kappa](Rate r) { return kappa[r]; };
  const double z1 = z.a1;
  const double z2sq = z.a2 * z.a2;
  const double act = k(Rate::k8) * k(Rate::k7) * z2sq;
  const double deact = k(Rate::km8) * k(Rate::km7) * z.a4;
  const double denom = act + deact;
  const double m1 = k(Rate::km1) + k(Rate::k2);
  const double m3 = k(Rate::km3) + k(Rate::k4);
  const double m5 = k(Rate::km5) + k(Rate::k6);
  const double low = m1 + k(Rate::k1) * z1;
  const double high = m3 + k(Rate::k3) * z1;
  const double e2_denom = m5 + k(Rate::k5) * z.a2;

  std::array<double, kNumFast> mu{};
  mu[fast::kA3] = k(Rate::k8) * z2sq / (k(Rate::km8) * z.a4);
  mu[fast::kE1] = m1 * deact * j1 / (low * denom);
  mu[fast::kE1A1] = k(Rate::k1) * deact * j1 * z1 / (low * denom);
  mu[fast::kE1Star] = m3 * act * j1 / (high * denom);
  mu[fast::kE1StarA1] = k(Rate::k3) * act * j1 * z1 / (high * denom);
  mu[fast::kE2] = j2 * m5 / e2_denom;
  mu[fast::kE2A2] = j2 * k(Rate::k5) * z.a2 / e2_denom;
  return mu;
}

double averaged_intensity(Reaction k, const RateConstants& kappa, double j1, double j2,
                          const SlowState& z) {
  switch (k) {
    case Reaction::R7:
    case Reaction::Rm7:
    case Reaction::R7p:
    case Reaction::Rm7p:
      throw UnsupportedReaction("averaged intensity of " + std::string(reaction_name(k)) +
                                " is not available in closed form");
    case Reaction::R8:
      return kappa[Rate::k8] * z.a2 * z.a2;
    default:
      break;
  }
  const auto mu = stationary_means(kappa, j1, j2, z);
  auto mean_of = [&](Species s) -> double {
    switch (s) {
      case Species::A1:
        return z.a1;
      case Species::A2:
        return z.a2;
      case Species::A4:
        return z.a4;
      case Species::A3:
        return mu[fast::kA3];
      case Species::E1:
        return mu[fast::kE1];
      case Species::E1Star:
        return mu[fast::kE1Star];
      case Species::E1A1:
        return mu[fast::kE1A1];
      case Species::E1StarA1:
        return mu[fast::kE1StarA1];
      case Species::E2:
        return mu[fast::kE2];
      case Species::E2A2:
        return mu[fast::kE2A2];
    }
    return 0.0;
  };
  const ReactionSpec& spec = build_network().reactions[idx(k)];
  const double c = kappa[spec.rate];
  switch (spec.kind) {
    case PropensityKind::kConstant:
      return c;
    case PropensityKind::kUnary:
      return c * mean_of(spec.first);
    case PropensityKind::kBinary:
      // At most one factor is fast, so the average factorises.
      return c * mean_of(spec.first) * mean_of(spec.second);
    case PropensityKind::kA2Pair:
      return c * z.a2 * z.a2;
  }
  return 0.0;
}

DriftResiduals drift_identity_check(const EffectiveParams& theta, const RateConstants& kappa,
                                    double j1, double j2, const SlowState& z) {
  if (!(z.a4 > 0.0)) throw DomainError("drift_identity_check requires z_A4 > 0");
  const EffectiveParams expected = effective_params(kappa, j1, j2);
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    if (std::abs(theta[i] - expected[i]) > 1e-12 * std::abs(expected[i])) {
      throw DomainError("theta does not match effective_params(kappa, J1, J2) at " +
                        std::string(EffectiveParams::name(i)));
    }
  }
  auto lb = [&](Reaction r) { return averaged_intensity(r, kappa, j1, j2, z); };
  const double f = f_theta(theta, z);
  const double g = g_theta(theta, z.a2);
  const double drift_a1 = -lb(Reaction::R1) + lb(Reaction::Rm1) - lb(Reaction::R3) + lb(Reaction::Rm3);
  const double drift_a2 = lb(Reaction::R2) + lb(Reaction::R4) - lb(Reaction::R5) +
                          lb(Reaction::Rm5) - 2.0 * lb(Reaction::R8) + 2.0 * lb(Reaction::Rm8);
  return {std::abs(drift_a1 + f), std::abs(drift_a2 - (f - g))};
}

}  // namespace glyco
