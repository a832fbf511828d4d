#include "glyco/identifiability.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "glyco/rng.hpp"

namespace glyco {

namespace {

Eigen::Matrix<double, 12, 12> to_eigen(const VandermondeMatrix& v) {
  Eigen::Matrix<double, 12, 12> m;
  for (std::size_t r = 0; r < 12; ++r) {
    for (std::size_t c = 0; c < 12; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r][c];
  }
  return m;
}

struct Spectrum {
  double sigma_min;
  double condition;
};

Spectrum spectrum(const OrbitPoints& points) {
  Eigen::JacobiSVD<Eigen::Matrix<double, 12, 12>> svd(to_eigen(vandermonde_matrix(points)));
  const double lo = svd.singularValues()(11);
  const double hi = svd.singularValues()(0);
  return {lo, lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()};
}

OrbitPoints sample(const OdeSolution& solution, const std::array<double, kNumOrbitPoints>& times) {
  OrbitPoints out;
  out.a4 = solution.a4();
  for (std::size_t k = 0; k < kNumOrbitPoints; ++k) {
    const auto z = solution(times[k]);
    out.points[k] = {times[k], z[0], z[1]};
  }
  return out;
}

}  // namespace

std::array<double, 12> vandermonde_row(double x, double y) {
  std::array<double, 12> row{};
  double xp = 1.0;
  for (std::size_t a = 0; a < 4; ++a) {
    row[3 * a] = xp;
    row[3 * a + 1] = xp * y;
    row[3 * a + 2] = xp * y * y;
    xp *= x;
  }
  return row;
}

VandermondeMatrix vandermonde_matrix(const OrbitPoints& points) {
  VandermondeMatrix m{};
  for (std::size_t k = 0; k < kNumOrbitPoints; ++k) {
    const auto& p = points.points[k];
    m[k] = vandermonde_row(p.a1, p.a2 * p.a2);
  }
  return m;
}

IdentifiabilityReport identifiability_check(const OrbitPoints& points, double tol_cond) {
  IdentifiabilityReport report;
  const auto m = to_eigen(vandermonde_matrix(points));
  report.determinant = m.fullPivLu().determinant();
  Eigen::JacobiSVD<Eigen::Matrix<double, 12, 12>> svd(m);
  report.sigma_max = svd.singularValues()(0);
  report.sigma_min = svd.singularValues()(11);
  report.condition = report.sigma_min > 0.0 ? report.sigma_max / report.sigma_min
                                            : std::numeric_limits<double>::infinity();
  report.invertible = report.condition <= tol_cond;

  report.all_a1_positive = std::all_of(points.points.begin(), points.points.end(),
                                       [](const OrbitPoint& p) { return p.a1 > 0.0; });
  for (std::size_t i = 0; i < kNumOrbitPoints && !report.distinct_positive_a2; ++i) {
    for (std::size_t j = i + 1; j < kNumOrbitPoints; ++j) {
      const double u = points.points[i].a2;
      const double v = points.points[j].a2;
      if (u > 0.0 && v > 0.0 && u != v) {
        report.distinct_positive_a2 = true;
        break;
      }
    }
  }
  report.contains_origin = std::any_of(points.points.begin(), points.points.end(),
                                       [](const OrbitPoint& p) { return p.a1 == 0.0 && p.a2 == 0.0; });
  return report;
}

SelectionStrategy parse_strategy(std::string_view text) {
  if (text == "equitime") return SelectionStrategy::kEquitime;
  if (text == "greedy") return SelectionStrategy::kGreedy;
  throw DomainError("unknown point-selection strategy: " + std::string(text));
}

std::string_view strategy_name(SelectionStrategy s) {
  return s == SelectionStrategy::kEquitime ? "equitime" : "greedy";
}

OrbitPoints select_points(const OdeSolution& solution, SelectionStrategy strategy,
                          std::uint64_t seed, const SelectionOptions& options) {
  const double horizon = solution.horizon();
  if (!(horizon > 0.0)) throw DomainError("solution must span a positive horizon");
  std::array<double, kNumOrbitPoints> times{};
  for (std::size_t j = 0; j < kNumOrbitPoints; ++j) {
    times[j] = static_cast<double>(j + 1) * horizon / 13.0;
  }
  OrbitPoints best = sample(solution, times);
  if (strategy == SelectionStrategy::kEquitime) return best;

  if (options.pool < kNumOrbitPoints) throw DomainError("candidate pool smaller than 12");
  Spectrum incumbent = spectrum(best);
  Rng rng(seed);
  std::vector<std::size_t> pool(options.pool);
  for (std::size_t c = 0; c < options.candidates; ++c) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    // Partial Fisher-Yates: the first 12 entries are a uniform 12-subset.
    for (std::size_t k = 0; k < kNumOrbitPoints; ++k) {
      std::swap(pool[k], pool[k + rng.below(pool.size() - k)]);
    }
    std::array<std::size_t, kNumOrbitPoints> picked{};
    std::copy_n(pool.begin(), kNumOrbitPoints, picked.begin());
    std::sort(picked.begin(), picked.end());
    for (std::size_t k = 0; k < kNumOrbitPoints; ++k) {
      times[k] = static_cast<double>(picked[k] + 1) * horizon / static_cast<double>(options.pool + 1);
    }
    OrbitPoints candidate = sample(solution, times);
    const Spectrum s = spectrum(candidate);
    // A candidate must not worsen the condition number either, so the result
    // is never worse than the equitime set on both measures.
    if (s.sigma_min > incumbent.sigma_min && s.condition <= incumbent.condition) {
      incumbent = s;
      best = candidate;
    }
  }
  return best;
}

}  // namespace glyco
