#include <gtest/gtest.h>

#include <cmath>

#include "glyco/network.hpp"
#include "glyco/rng.hpp"

using namespace glyco;

namespace {

State random_state(Rng& rng) {
  State x{};
  for (auto& v : x) v = static_cast<std::int64_t>(rng.below(6));
  return x;
}

}  // namespace

// Net change of each species, written out reaction by reaction from the
// reaction scheme (order A1 A2 A3 A4 E1 E1* E1A1 E1*A1 E2 E2A2).
TEST(Network, StoichiometryMatchesReactionScheme) {
  const int expected[kNumReactions][kNumSpecies] = {
      {+1, 0, 0, 0, 0, 0, 0, 0, 0, 0},     // R0: 0 -> A1
      {-1, 0, 0, 0, -1, 0, +1, 0, 0, 0},   // R1: E1 + A1 -> E1A1
      {+1, 0, 0, 0, +1, 0, -1, 0, 0, 0},   // Rm1
      {0, +1, 0, 0, +1, 0, -1, 0, 0, 0},   // R2: E1A1 -> E1 + A2
      {-1, 0, 0, 0, 0, -1, 0, +1, 0, 0},   // R3: E1* + A1 -> E1*A1
      {+1, 0, 0, 0, 0, +1, 0, -1, 0, 0},   // Rm3
      {0, +1, 0, 0, 0, +1, 0, -1, 0, 0},   // R4: E1*A1 -> E1* + A2
      {0, -1, 0, 0, 0, 0, 0, 0, -1, +1},   // R5: E2 + A2 -> E2A2
      {0, +1, 0, 0, 0, 0, 0, 0, +1, -1},   // Rm5
      {0, 0, 0, 0, 0, 0, 0, 0, +1, -1},    // R6: E2A2 -> E2
      {0, 0, -1, 0, -1, +1, 0, 0, 0, 0},   // R7: E1 + A3 -> E1*
      {0, 0, +1, 0, +1, -1, 0, 0, 0, 0},   // Rm7
      {0, 0, -1, 0, 0, 0, -1, +1, 0, 0},   // R7': E1A1 + A3 -> E1*A1
      {0, 0, +1, 0, 0, 0, +1, -1, 0, 0},   // Rm7'
      {0, -2, +1, +1, 0, 0, 0, 0, 0, 0},   // R8: 2 A2 -> A3 + A4
      {0, +2, -1, -1, 0, 0, 0, 0, 0, 0},   // Rm8
  };
  const Network& net = build_network();
  for (std::size_t k = 0; k < kNumReactions; ++k) {
    for (std::size_t s = 0; s < kNumSpecies; ++s) {
      EXPECT_EQ(net.nu[k][s], expected[k][s]) << reaction_name(static_cast<Reaction>(k)) << " "
                                              << species_name(static_cast<Species>(s));
    }
  }
}

TEST(Network, EveryReactionConservesEnzymeTotals) {
  const Network& net = build_network();
  for (std::size_t k = 0; k < kNumReactions; ++k) {
    const auto& nu = net.nu[k];
    EXPECT_EQ(nu[idx(Species::E1)] + nu[idx(Species::E1Star)] + nu[idx(Species::E1A1)] +
                  nu[idx(Species::E1StarA1)],
              0);
    EXPECT_EQ(nu[idx(Species::E2)] + nu[idx(Species::E2A2)], 0);
  }
}

TEST(Network, PropensityOracleAtHandState) {
  const RateTable k = RateConstants::reference().values();
  // x = (A1, A2, A3, A4, E1, E1*, E1A1, E1*A1, E2, E2A2)
  const State x = {7, 4, 3, 11, 2, 1, 5, 6, 8, 9};
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R0, k), 0.5);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R1, k), 1.0 * 2 * 7);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::Rm1, k), 1.94 * 5);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R2, k), 0.06 * 5);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R3, k), 5.0 * 1 * 7);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::Rm3, k), 4.6 * 6);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R4, k), 0.4 * 6);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R5, k), 1.0 * 8 * 4);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::Rm5, k), 1.7 * 9);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R6, k), 0.3 * 9);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R7, k), 1.0 * 2 * 3);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::Rm7, k), 1.7321 * 1);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R7p, k), 1.0 * 5 * 3);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::Rm7p, k), 1.7321 * 6);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::R8, k), 1.0 * 4 * 3);
  EXPECT_DOUBLE_EQ(propensity(x, Reaction::Rm8, k), 1.7321 * 3 * 11);
}

TEST(Network, A2PairPropensityVanishesBelowTwo) {
  const RateTable k = RateConstants::reference().values();
  State x{};
  x[idx(Species::A2)] = 1;
  EXPECT_EQ(propensity(x, Reaction::R8, k), 0.0);
  x[idx(Species::A2)] = 0;
  EXPECT_EQ(propensity(x, Reaction::R8, k), 0.0);
}

TEST(Network, PositivePropensityNeverDrivesCountsNegative) {
  Rng rng(17);
  const RateTable k = RateConstants::reference().values();
  for (int trial = 0; trial < 5000; ++trial) {
    const State x = random_state(rng);
    for (std::size_t r = 0; r < kNumReactions; ++r) {
      const auto reaction = static_cast<Reaction>(r);
      if (propensity(x, reaction, k) > 0.0) {
        const State y = apply(x, reaction);
        for (auto v : y) ASSERT_GE(v, 0);
      }
    }
  }
}

TEST(Network, ScalingExponents) {
  EXPECT_EQ(ScalingRegime::alpha(Species::A1), 1);
  EXPECT_EQ(ScalingRegime::alpha(Species::A2), 1);
  EXPECT_EQ(ScalingRegime::alpha(Species::A4), 2);
  for (auto s : {Species::A3, Species::E1, Species::E1Star, Species::E1A1, Species::E1StarA1,
                 Species::E2, Species::E2A2}) {
    EXPECT_EQ(ScalingRegime::alpha(s), 0);
  }
  for (auto r : {Rate::k0, Rate::km1, Rate::k2, Rate::km3, Rate::k4, Rate::km5, Rate::k6}) {
    EXPECT_EQ(ScalingRegime::beta(r), 1.0);
  }
  for (auto r : {Rate::k1, Rate::k3, Rate::k5}) EXPECT_EQ(ScalingRegime::beta(r), 0.0);
  EXPECT_EQ(ScalingRegime::beta(Rate::k7), 0.5);
  EXPECT_EQ(ScalingRegime::beta(Rate::km7), 0.5);
  EXPECT_EQ(ScalingRegime::beta(Rate::k8), -1.0);
  EXPECT_EQ(ScalingRegime::beta(Rate::km8), -1.0);
}

TEST(Network, UnscaledRatesAtHundred) {
  const RateTable u = unscaled_rates(RateConstants::reference(), ScalingRegime(100));
  EXPECT_DOUBLE_EQ(u[idx(Rate::k0)], 50.0);
  EXPECT_DOUBLE_EQ(u[idx(Rate::k1)], 1.0);
  EXPECT_DOUBLE_EQ(u[idx(Rate::km1)], 194.0);
  EXPECT_DOUBLE_EQ(u[idx(Rate::k7)], 10.0);
  EXPECT_DOUBLE_EQ(u[idx(Rate::km7)], 17.321);
  EXPECT_DOUBLE_EQ(u[idx(Rate::k8)], 0.01);
}

// The scaled propensity times n^{beta} equals the unscaled propensity of the
// corresponding integer state, for every reaction.
TEST(Network, ScaledAndUnscaledPropensitiesAgree) {
  const std::int64_t n = 50;
  const ScalingRegime regime(n);
  const RateTable k = RateConstants::reference().values();
  const RateTable u = unscaled_rates(k, regime);
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    State x = random_state(rng);
    x[idx(Species::A1)] *= n;
    x[idx(Species::A2)] *= n;
    x[idx(Species::A4)] *= n * n;
    const auto z = scale_state(x, regime);
    for (std::size_t r = 0; r < kNumReactions; ++r) {
      const auto reaction = static_cast<Reaction>(r);
      const Rate rate = build_network().reactions[r].rate;
      const double expect = propensity(x, reaction, u);
      // Species scaling: lambda^(n)(x) = n^{beta_k + sum alpha_reactants} lambda(z).
      const double got = scaled_propensity(z, reaction, k, n);
      int alpha_sum = 0;
      const auto& spec = build_network().reactions[r];
      switch (spec.kind) {
        case PropensityKind::kConstant: break;
        case PropensityKind::kUnary: alpha_sum = ScalingRegime::alpha(spec.first); break;
        case PropensityKind::kBinary:
          alpha_sum = ScalingRegime::alpha(spec.first) + ScalingRegime::alpha(spec.second);
          break;
        case PropensityKind::kA2Pair: alpha_sum = 2; break;
      }
      const double factor = std::pow(static_cast<double>(n), ScalingRegime::beta(rate) + alpha_sum);
      EXPECT_NEAR(got * factor, expect, 1e-9 * std::max(1.0, expect));
    }
  }
}

TEST(Network, ConservationTotals) {
  const State x = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(conservation_totals(x), (ConservationTotals{5 + 6 + 7 + 8, 9 + 10}));
}

TEST(EffectiveParams, ReferenceRatesGiveReferenceTheta) {
  const auto theta = effective_params(RateConstants::reference(), 5.0, 5.0);
  const double expected[] = {0.5, 3.0, 2.0, 1.0, 2.0, 0.3, 2.0, 1.5};
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) EXPECT_NEAR(theta[i], expected[i], 5e-3);
  // K1 carries the truncation of sqrt(3): 1.7321^2 / 1.
  EXPECT_NEAR(theta.k1(), 1.7321 * 1.7321, 1e-12);
}

TEST(EffectiveParams, AllOnesHandOracle) {
  std::array<double, kNumRates> ones{};
  ones.fill(1.0);
  const auto theta = effective_params(RateConstants(ones), 1.0, 1.0);
  const double expected[] = {1, 1, 2, 2, 2, 1, 1, 1};
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) EXPECT_DOUBLE_EQ(theta[i], expected[i]);
}

TEST(EffectiveParams, RejectsNonpositiveInputs) {
  EXPECT_THROW(effective_params(RateConstants::reference(), 0.0, 5.0), DomainError);
  EXPECT_THROW(effective_params(RateConstants::reference(), 5.0, -1.0), DomainError);
  auto k = RateConstants::reference().values();
  k[idx(Rate::k3)] = 0.0;
  EXPECT_THROW(RateConstants{k}, DomainError);
  EXPECT_THROW(EffectiveParams({1, 1, 1, 1, 0, 1, 1, 1}), DomainError);
}

TEST(Rng, DerivedSeedsDifferAndRepeat) {
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 1), derive_seed(2, 1));
  EXPECT_EQ(derive_seed(9, 4), derive_seed(9, 4));
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, UniformIsInOpenUnitInterval) {
  Rng rng(11);
  double sum = 0.0;
  const int count = 200000;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / count, 0.5, 5 * std::sqrt(1.0 / 12.0 / count));
}

TEST(Rng, BelowIsUniform) {
  Rng rng(12);
  std::array<int, 7> hits{};
  const int count = 70000;
  for (int i = 0; i < count; ++i) ++hits[rng.below(7)];
  for (int h : hits) EXPECT_NEAR(h, count / 7.0, 5 * std::sqrt(count / 7.0));
}
