// Generalized Vandermonde diagnostic: twelve orbit points identify theta when
// the matrix of rows V(z_A1, z_A2^2) is invertible.
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "glyco/reduced.hpp"

namespace glyco {

inline constexpr std::size_t kNumOrbitPoints = 12;

/// (1, y, y^2, x, xy, xy^2, x^2, x^2 y, x^2 y^2, x^3, x^3 y, x^3 y^2).
std::array<double, 12> vandermonde_row(double x, double y);

struct OrbitPoint {
  double t = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
};

struct OrbitPoints {
  std::array<OrbitPoint, kNumOrbitPoints> points{};
  double a4 = 1.0;
};

using VandermondeMatrix = std::array<std::array<double, 12>, kNumOrbitPoints>;

/// Row k is vandermonde_row(a1_k, a2_k^2).
VandermondeMatrix vandermonde_matrix(const OrbitPoints& points);

struct IdentifiabilityReport {
  double determinant = 0.0;
  double condition = 0.0;  // sigma_max / sigma_min; +inf when sigma_min = 0
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool invertible = false;             // condition <= tol_cond
  bool all_a1_positive = false;        // z_A1(k) > 0 for every k
  bool distinct_positive_a2 = false;   // two positive, different z_A2 values
  bool contains_origin = false;        // informational only
};

IdentifiabilityReport identifiability_check(const OrbitPoints& points, double tol_cond = 1e12);

enum class SelectionStrategy { kEquitime, kGreedy };

SelectionStrategy parse_strategy(std::string_view text);
std::string_view strategy_name(SelectionStrategy s);

struct SelectionOptions {
  std::size_t candidates = 200;  // random subsets tried by the greedy strategy
  std::size_t pool = 1000;       // uniform grid times the subsets are drawn from
};

/// Equitime: t = jT/13, j = 1..12. Greedy: the equitime set plus `candidates`
/// seeded random subsets of the pool; keeps the largest smallest singular value
/// among subsets whose condition number is no worse than the incumbent.
OrbitPoints select_points(const OdeSolution& solution, SelectionStrategy strategy,
                          std::uint64_t seed, const SelectionOptions& options = {});

}  // namespace glyco
