#include "glyco/network.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <utility>
#include <string>

namespace glyco {

namespace {

constexpr std::array<std::string_view, kNumSpecies> kSpeciesNames = {
    "A1", "A2", "A3", "A4", "E1", "E1star", "E1A1", "E1starA1", "E2", "E2A2"};

constexpr std::array<std::string_view, kNumReactions> kReactionNames = {
    "R0", "R1", "Rm1", "R2", "R3", "Rm3", "R4", "R5",
    "Rm5", "R6", "R7", "Rm7", "R7p", "Rm7p", "R8", "Rm8"};

constexpr std::array<std::string_view, kNumRates> kRateNames = {
    "k0", "k1", "km1", "k2", "k3", "km3", "k4", "k5", "km5", "k6", "k7", "km7", "k8", "km8"};

constexpr std::array<std::string_view, kNumEffectiveParams> kThetaNames = {
    "kappa0", "K1", "K_M1", "K_M1_star", "K_M2", "J1_bullet", "J1_star", "J2_bullet"};

Network make_network() {
  using S = Species;
  using R = Reaction;
  using K = PropensityKind;
  Network net{};
  auto set = [&net](R r, Rate rate, K kind, S a, S b,
                    std::initializer_list<std::pair<S, int>> change) {
    net.reactions[idx(r)] = ReactionSpec{rate, kind, a, b};
    for (auto [s, d] : change) net.nu[idx(r)][idx(s)] = d;
  };
  // first/second are ignored where the kind does not use them.
  set(R::R0, Rate::k0, K::kConstant, S::A1, S::A1, {{S::A1, +1}});
  set(R::R1, Rate::k1, K::kBinary, S::E1, S::A1, {{S::A1, -1}, {S::E1, -1}, {S::E1A1, +1}});
  set(R::Rm1, Rate::km1, K::kUnary, S::E1A1, S::E1A1, {{S::A1, +1}, {S::E1, +1}, {S::E1A1, -1}});
  set(R::R2, Rate::k2, K::kUnary, S::E1A1, S::E1A1, {{S::A2, +1}, {S::E1, +1}, {S::E1A1, -1}});
  set(R::R3, Rate::k3, K::kBinary, S::E1Star, S::A1,
      {{S::A1, -1}, {S::E1Star, -1}, {S::E1StarA1, +1}});
  set(R::Rm3, Rate::km3, K::kUnary, S::E1StarA1, S::E1StarA1,
      {{S::A1, +1}, {S::E1Star, +1}, {S::E1StarA1, -1}});
  set(R::R4, Rate::k4, K::kUnary, S::E1StarA1, S::E1StarA1,
      {{S::A2, +1}, {S::E1Star, +1}, {S::E1StarA1, -1}});
  set(R::R5, Rate::k5, K::kBinary, S::E2, S::A2, {{S::A2, -1}, {S::E2, -1}, {S::E2A2, +1}});
  set(R::Rm5, Rate::km5, K::kUnary, S::E2A2, S::E2A2, {{S::A2, +1}, {S::E2, +1}, {S::E2A2, -1}});
  // Product of R6 is not tracked.
  set(R::R6, Rate::k6, K::kUnary, S::E2A2, S::E2A2, {{S::E2, +1}, {S::E2A2, -1}});
  set(R::R7, Rate::k7, K::kBinary, S::E1, S::A3, {{S::A3, -1}, {S::E1, -1}, {S::E1Star, +1}});
  set(R::Rm7, Rate::km7, K::kUnary, S::E1Star, S::E1Star,
      {{S::A3, +1}, {S::E1, +1}, {S::E1Star, -1}});
  set(R::R7p, Rate::k7, K::kBinary, S::E1A1, S::A3,
      {{S::A3, -1}, {S::E1A1, -1}, {S::E1StarA1, +1}});
  set(R::Rm7p, Rate::km7, K::kUnary, S::E1StarA1, S::E1StarA1,
      {{S::A3, +1}, {S::E1A1, +1}, {S::E1StarA1, -1}});
  set(R::R8, Rate::k8, K::kA2Pair, S::A2, S::A2, {{S::A2, -2}, {S::A3, +1}, {S::A4, +1}});
  set(R::Rm8, Rate::km8, K::kBinary, S::A3, S::A4, {{S::A2, +2}, {S::A3, -1}, {S::A4, -1}});
  return net;
}

}  // namespace

std::string_view species_name(Species s) { return kSpeciesNames.at(idx(s)); }
std::string_view reaction_name(Reaction r) { return kReactionNames.at(idx(r)); }
std::string_view rate_name(Rate r) { return kRateNames.at(idx(r)); }
std::string_view EffectiveParams::name(std::size_t i) { return kThetaNames.at(i); }

RateConstants::RateConstants(const std::array<double, kNumRates>& values) : values_(values) {
  for (std::size_t i = 0; i < kNumRates; ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("rate constant " + std::string(kRateNames[i]) + " must be positive");
    }
  }
}

RateConstants RateConstants::reference() {
  return RateConstants({0.5, 1.0, 1.94, 0.06, 5.0, 4.6, 0.4, 1.0, 1.7, 0.3, 1.0, 1.7321, 1.0,
                        1.7321});
}

ScalingRegime::ScalingRegime(std::int64_t n) : n_(n) {
  if (n < 1) throw DomainError("scaling parameter n must be >= 1");
}

int ScalingRegime::alpha(Species s) {
  switch (s) {
    case Species::A4:
      return 2;
    case Species::A1:
    case Species::A2:
      return 1;
    default:
      return 0;
  }
}

double ScalingRegime::beta(Rate r) {
  switch (r) {
    case Rate::k1:
    case Rate::k3:
    case Rate::k5:
      return 0.0;
    case Rate::k7:
    case Rate::km7:
      return 0.5;
    case Rate::k8:
    case Rate::km8:
      return -1.0;
    default:
      return 1.0;
  }
}

const Network& build_network() {
  static const Network net = make_network();
  return net;
}

RateTable unscaled_rates(const RateTable& kappa, const ScalingRegime& regime) {
  const double n = static_cast<double>(regime.n());
  RateTable out{};
  for (std::size_t i = 0; i < kNumRates; ++i) {
    const double b = ScalingRegime::beta(static_cast<Rate>(i));
    double factor = 1.0;
    if (b == 1.0) {
      factor = n;
    } else if (b == 0.5) {
      factor = std::sqrt(n);
    } else if (b == -1.0) {
      factor = 1.0 / n;
    }
    out[i] = factor * kappa[i];
  }
  return out;
}

double propensity(const State& x, Reaction k, const RateTable& unscaled) {
  const ReactionSpec& spec = build_network().reactions[idx(k)];
  const double c = unscaled[idx(spec.rate)];
  switch (spec.kind) {
    case PropensityKind::kConstant:
      return c;
    case PropensityKind::kUnary:
      return c * static_cast<double>(x[idx(spec.first)]);
    case PropensityKind::kBinary:
      return c * static_cast<double>(x[idx(spec.first)]) *
             static_cast<double>(x[idx(spec.second)]);
    case PropensityKind::kA2Pair: {
      const auto a2 = x[idx(Species::A2)];
      return a2 < 2 ? 0.0 : c * static_cast<double>(a2) * static_cast<double>(a2 - 1);
    }
  }
  return 0.0;
}

double scaled_propensity(const std::array<double, kNumSpecies>& z, Reaction k,
                         const RateTable& kappa, std::int64_t n) {
  const ReactionSpec& spec = build_network().reactions[idx(k)];
  const double c = kappa[idx(spec.rate)];
  switch (spec.kind) {
    case PropensityKind::kConstant:
      return c;
    case PropensityKind::kUnary:
      return c * z[idx(spec.first)];
    case PropensityKind::kBinary:
      return c * z[idx(spec.first)] * z[idx(spec.second)];
    case PropensityKind::kA2Pair: {
      const double a2 = z[idx(Species::A2)];
      return std::max(0.0, c * a2 * (a2 - 1.0 / static_cast<double>(n)));
    }
  }
  return 0.0;
}

std::array<double, kNumSpecies> scale_state(const State& x, const ScalingRegime& regime) {
  const double n = static_cast<double>(regime.n());
  std::array<double, kNumSpecies> z{};
  for (std::size_t i = 0; i < kNumSpecies; ++i) {
    const int a = ScalingRegime::alpha(static_cast<Species>(i));
    const double v = static_cast<double>(x[i]);
    z[i] = a == 0 ? v : (a == 1 ? v / n : v / (n * n));
  }
  return z;
}

ConservationTotals conservation_totals(const State& x) {
  return {x[idx(Species::E1)] + x[idx(Species::E1A1)] + x[idx(Species::E1Star)] +
              x[idx(Species::E1StarA1)],
          x[idx(Species::E2)] + x[idx(Species::E2A2)]};
}

State apply(const State& x, Reaction k) {
  const auto& nu = build_network().nu[idx(k)];
  State y = x;
  for (std::size_t i = 0; i < kNumSpecies; ++i) y[i] += nu[i];
  return y;
}

EffectiveParams::EffectiveParams(const std::array<double, kNumEffectiveParams>& values)
    : values_(values) {
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw DomainError("effective parameter " + std::string(kThetaNames[i]) +
                        " must be positive");
    }
  }
}

EffectiveParams EffectiveParams::unchecked(const std::array<double, kNumEffectiveParams>& values) {
  EffectiveParams p;
  p.values_ = values;
  return p;
}

EffectiveParams effective_params(const RateConstants& kappa, double j1, double j2) {
  if (!(j1 > 0.0) || !(j2 > 0.0)) {
    throw DomainError("conservation totals J1, J2 must be positive");
  }
  const auto k = [&kappa](Rate r) { return kappa[r]; };
  return EffectiveParams({
      k(Rate::k0),
      k(Rate::km7) * k(Rate::km8) / (k(Rate::k7) * k(Rate::k8)),
      (k(Rate::km1) + k(Rate::k2)) / k(Rate::k1),
      (k(Rate::km3) + k(Rate::k4)) / k(Rate::k3),
      (k(Rate::km5) + k(Rate::k6)) / k(Rate::k5),
      k(Rate::k2) * j1,
      k(Rate::k4) * j1,
      k(Rate::k6) * j2,
  });
}

}  // namespace glyco
