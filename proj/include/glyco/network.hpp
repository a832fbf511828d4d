// Static description of the glycolytic reaction network: species, reactions,
// stoichiometry, mass-action propensities, the (alpha, beta) scaling regime,
// conservation totals and the map to the reduced model's effective parameters.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string_view>

namespace glyco {

inline constexpr std::size_t kNumSpecies = 10;
inline constexpr std::size_t kNumReactions = 16;
inline constexpr std::size_t kNumRates = 14;
inline constexpr std::size_t kNumEffectiveParams = 8;

/// Thrown when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Species : std::size_t {
  A1 = 0,  // F6P
  A2,      // ADP
  A3,      // AMP
  A4,      // ATP
  E1,
  E1Star,
  E1A1,
  E1StarA1,
  E2,
  E2A2,
};

// Primed activation reactions are R7p / Rm7p.
enum class Reaction : std::size_t {
  R0 = 0,
  R1,
  Rm1,
  R2,
  R3,
  Rm3,
  R4,
  R5,
  Rm5,
  R6,
  R7,
  Rm7,
  R7p,
  Rm7p,
  R8,
  Rm8,
};

// The 14 distinct rate constants. R7/R7p share k7 and Rm7/Rm7p share km7.
enum class Rate : std::size_t {
  k0 = 0,
  k1,
  km1,
  k2,
  k3,
  km3,
  k4,
  k5,
  km5,
  k6,
  k7,
  km7,
  k8,
  km8,
};

constexpr std::size_t idx(Species s) { return static_cast<std::size_t>(s); }
constexpr std::size_t idx(Reaction r) { return static_cast<std::size_t>(r); }
constexpr std::size_t idx(Rate r) { return static_cast<std::size_t>(r); }

std::string_view species_name(Species s);
std::string_view reaction_name(Reaction r);
/// Config-style key of a rate constant: "k0", "k1", "km1", ...
std::string_view rate_name(Rate r);

/// Molecule copy numbers, indexed by Species.
using State = std::array<std::int64_t, kNumSpecies>;
using Stoichiometry = std::array<std::array<int, kNumSpecies>, kNumReactions>;
using ReactionCounts = std::array<std::uint64_t, kNumReactions>;

/// Scaled rate constants kappa (all strictly positive).
class RateConstants {
 public:
  explicit RateConstants(const std::array<double, kNumRates>& values);

  double operator[](Rate r) const { return values_[idx(r)]; }
  const std::array<double, kNumRates>& values() const { return values_; }

  /// The reference rate set (sqrt(3) truncated to 1.7321).
  static RateConstants reference();

 private:
  std::array<double, kNumRates> values_;
};

/// Like RateConstants but individual entries may be zero; used where the
/// simulator is driven with switched-off reactions.
using RateTable = std::array<double, kNumRates>;

/// The fixed multiscale regime; n is the only free parameter.
class ScalingRegime {
 public:
  explicit ScalingRegime(std::int64_t n);

  std::int64_t n() const { return n_; }
  /// Species abundance exponent alpha_i.
  static int alpha(Species s);
  /// Rate exponent beta_k.
  static double beta(Rate r);

 private:
  std::int64_t n_;
};

enum class PropensityKind {
  kConstant,  // kappa
  kUnary,     // kappa * x_a
  kBinary,    // kappa * x_a * x_b
  kA2Pair,    // kappa * x_A2 * (x_A2 - 1)
};

struct ReactionSpec {
  Rate rate;
  PropensityKind kind;
  Species first;
  Species second;
};

struct Network {
  Stoichiometry nu;
  std::array<ReactionSpec, kNumReactions> reactions;
};

/// The glycolytic network. Returns a reference to a process-wide immutable table.
const Network& build_network();

/// Unscaled rate table kappa^(n)_k = n^{beta_k} kappa_k.
RateTable unscaled_rates(const RateTable& kappa, const ScalingRegime& regime);
inline RateTable unscaled_rates(const RateConstants& kappa, const ScalingRegime& regime) {
  return unscaled_rates(kappa.values(), regime);
}

/// lambda^(n)_k(x) with unscaled rates; lambda_8 uses x_A2 (x_A2 - 1).
double propensity(const State& x, Reaction k, const RateTable& unscaled);

/// Scaled propensity lambda_k(z) with scaled rates kappa; lambda_8 uses z_A2 (z_A2 - 1/n).
double scaled_propensity(const std::array<double, kNumSpecies>& z, Reaction k,
                         const RateTable& kappa, std::int64_t n);

/// z_i = n^{-alpha_i} x_i.
std::array<double, kNumSpecies> scale_state(const State& x, const ScalingRegime& regime);

struct ConservationTotals {
  std::int64_t j1;  // E1 + E1A1 + E1* + E1*A1
  std::int64_t j2;  // E2 + E2A2
  friend bool operator==(const ConservationTotals&, const ConservationTotals&) = default;
};

ConservationTotals conservation_totals(const State& x);

/// x + nu[k].
State apply(const State& x, Reaction k);

/// Reduced-model parameters (kappa0, K1, K_M1, K*_M1, K_M2, J1., J1*, J2.).
class EffectiveParams {
 public:
  enum Index : std::size_t { kKappa0 = 0, kK1, kKM1, kKM1Star, kKM2, kJ1Bullet, kJ1Star, kJ2Bullet };

  /// Validates strict positivity.
  explicit EffectiveParams(const std::array<double, kNumEffectiveParams>& values);
  /// No validation; callers (f/g evaluation inside optimizers, degenerate
  /// test models) may use zero entries.
  static EffectiveParams unchecked(const std::array<double, kNumEffectiveParams>& values);

  double operator[](std::size_t i) const { return values_[i]; }
  const std::array<double, kNumEffectiveParams>& values() const { return values_; }

  double kappa0() const { return values_[kKappa0]; }
  double k1() const { return values_[kK1]; }
  double km1() const { return values_[kKM1]; }
  double km1_star() const { return values_[kKM1Star]; }
  double km2() const { return values_[kKM2]; }
  double j1_bullet() const { return values_[kJ1Bullet]; }
  double j1_star() const { return values_[kJ1Star]; }
  double j2_bullet() const { return values_[kJ2Bullet]; }

  static std::string_view name(std::size_t i);

 private:
  EffectiveParams() = default;
  std::array<double, kNumEffectiveParams> values_{};
};

/// theta = (k0, km7 km8 / (k7 k8), (km1 + k2)/k1, (km3 + k4)/k3, (km5 + k6)/k5, k2 J1, k4 J1, k6 J2).
EffectiveParams effective_params(const RateConstants& kappa, double j1, double j2);

}  // namespace glyco
