#include "glyco/estimation.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "glyco/io.hpp"
#include "glyco/parallel.hpp"
#include "glyco/rng.hpp"

namespace glyco {

namespace {

// Sequential right-continuous lookup into the piecewise-constant data path.
class DataCursor {
 public:
  explicit DataCursor(const Dataset& data) : data_(&data) {}
  std::array<double, 2> operator()(double t) {
    const auto& ts = data_->times;
    if (t < ts[index_]) index_ = 0;
    while (index_ + 1 < ts.size() && ts[index_ + 1] <= t) ++index_;
    return {data_->a1[index_], data_->a2[index_]};
  }

 private:
  const Dataset* data_;
  std::size_t index_ = 0;
};

void validate(const Dataset& data) {
  if (data.times.empty() || data.times.size() != data.a1.size() ||
      data.times.size() != data.a2.size()) {
    throw DomainError("dataset columns must be nonempty and of equal length");
  }
  if (data.times.front() != 0.0) throw DomainError("dataset must start at t = 0");
  if (!(data.horizon > 0.0)) throw DomainError("dataset horizon must be positive");
  if (!(data.a4_initial > 0.0)) throw DomainError("dataset z_A4(0) must be positive");
}

template <typename Reference>
double trapezoid(const Dataset& data, Reference&& reference, std::size_t intervals) {
  if (intervals == 0) throw DomainError("quadrature needs at least one interval");
  DataCursor cursor(data);
  const double h = data.horizon / static_cast<double>(intervals);
  double sum = 0.0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    // i * h reproduces the grid-recording times bit for bit.
    const double t = i == intervals ? data.horizon : static_cast<double>(i) * h;
    const auto z = cursor(t);
    const auto ref = reference(t);
    const double d1 = z[0] - ref[0];
    const double d2 = z[1] - ref[1];
    const double w = (i == 0 || i == intervals) ? 0.5 : 1.0;
    sum += w * (d1 * d1 + d2 * d2);
  }
  return sum * h;
}

}  // namespace

ParamBox::ParamBox(const std::array<Interval, kNumEffectiveParams>& bounds) : Box8(bounds) {
  for (const auto& b : bounds) {
    if (!(b.lo > 0.0)) throw DomainError("parameter box lower bounds must be positive");
  }
}

ParamBox ParamBox::reference() {
  return ParamBox({Interval{0.01, 1.0}, {0.01, 4.0}, {0.01, 3.0}, {0.01, 2.0}, {0.01, 3.0},
                   {0.01, 1.0}, {0.01, 3.0}, {0.01, 2.0}});
}

LossValue loss(const EffectiveParams& theta, const Dataset& data, const LossOptions& options) {
  validate(data);
  const SlowState z0{data.a1.front(), data.a2.front(), data.a4_initial};
  try {
    const OdeSolution sol = solve_reduced(theta, z0, data.horizon, options.ode);
    OdeSolution::Cursor ode(sol);
    return {trapezoid(data, ode, options.grid_intervals), false};
  } catch (const IntegrationError&) {
    return {options.penalty, true};
  }
}

double trapezoid_mismatch(const Dataset& data,
                          const std::function<std::array<double, 2>(double)>& reference,
                          std::size_t intervals) {
  validate(data);
  return trapezoid(data, reference, intervals);
}

template <std::size_t N>
std::vector<std::array<double, N>> latin_hypercube(std::size_t m, const Box<N>& box,
                                                   std::uint64_t seed) {
  if (m == 0) throw DomainError("latin_hypercube needs m >= 1");
  Rng rng(seed);
  std::vector<std::array<double, N>> points(m);
  std::vector<std::size_t> perm(m);
  for (std::size_t i = 0; i < N; ++i) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t j = m - 1; j > 0; --j) {
      std::swap(perm[j], perm[rng.below(j + 1)]);
    }
    const double lo = box[i].lo;
    const double width = box[i].hi - box[i].lo;
    for (std::size_t j = 0; j < m; ++j) {
      const double u = (static_cast<double>(perm[j]) + rng.uniform()) / static_cast<double>(m);
      points[j][i] = std::clamp(lo + u * width, box[i].lo, box[i].hi);
    }
  }
  return points;
}

namespace {

// One simplex run from x0 with at most max_iters iterations.
template <std::size_t N>
NelderMeadResult<N> nelder_mead_run(
    const std::function<double(const std::array<double, N>&)>& objective,
    const std::array<double, N>& x0, const Box<N>& box, const NelderMeadOptions& options,
    std::size_t max_iters) {
  using Point = std::array<double, N>;
  std::size_t evaluations = 0;
  auto eval = [&](const Point& x) {
    ++evaluations;
    const double f = objective(x);
    return std::isnan(f) ? std::numeric_limits<double>::infinity() : f;
  };

  std::array<Point, N + 1> v;
  std::array<double, N + 1> fv;
  v[0] = box.project(x0);
  fv[0] = eval(v[0]);
  if (!std::isfinite(fv[0])) throw DomainError("objective is not finite at the initial point");
  for (std::size_t i = 0; i < N; ++i) {
    Point p = v[0];
    const double step = options.initial_step * (p[i] != 0.0 ? std::abs(p[i]) : 1.0);
    p[i] = p[i] + step <= box[i].hi ? p[i] + step : p[i] - step;
    v[i + 1] = box.project(p);
    fv[i + 1] = eval(v[i + 1]);
  }

  std::array<std::size_t, N + 1> order;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    std::array<Point, N + 1> vs;
    std::array<double, N + 1> fs;
    for (std::size_t j = 0; j <= N; ++j) {
      vs[j] = v[order[j]];
      fs[j] = fv[order[j]];
    }
    v = vs;
    fv = fs;
  };
  auto combine = [&](const Point& a, const Point& b, double c) {
    Point p;
    for (std::size_t i = 0; i < N; ++i) p[i] = a[i] + c * (b[i] - a[i]);
    return box.project(p);
  };

  std::size_t iterations = 0;
  bool converged = false;
  sort_simplex();
  while (true) {
    const double spread = fv[N] - fv[0];
    double diameter = 0.0;
    for (std::size_t j = 1; j <= N; ++j) {
      for (std::size_t i = 0; i < N; ++i) {
        const double scale = std::max(std::abs(v[0][i]), 1.0);
        diameter = std::max(diameter, std::abs(v[j][i] - v[0][i]) / scale);
      }
    }
    if (spread <= options.f_tol || diameter <= options.x_tol) {
      converged = true;
      break;
    }
    if (iterations >= max_iters) break;
    ++iterations;

    Point centroid{};
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t i = 0; i < N; ++i) centroid[i] += v[j][i];
    }
    for (auto& c : centroid) c /= static_cast<double>(N);

    const Point xr = combine(centroid, v[N], -1.0);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < fv[0]) {
      const Point xe = combine(centroid, v[N], -2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        v[N] = xe;
        fv[N] = fe;
      } else {
        v[N] = xr;
        fv[N] = fr;
      }
    } else if (fr < fv[N - 1]) {
      v[N] = xr;
      fv[N] = fr;
    } else if (fr < fv[N]) {
      const Point xc = combine(centroid, xr, 0.5);
      const double fc = eval(xc);
      if (fc <= fr) {
        v[N] = xc;
        fv[N] = fc;
      } else {
        shrink = true;
      }
    } else {
      const Point xc = combine(centroid, v[N], 0.5);
      const double fc = eval(xc);
      if (fc < fv[N]) {
        v[N] = xc;
        fv[N] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t j = 1; j <= N; ++j) {
        v[j] = combine(v[0], v[j], 0.5);
        fv[j] = eval(v[j]);
      }
    }
    sort_simplex();
  }
  return {v[0], fv[0], iterations, evaluations, converged};
}

}  // namespace

template <std::size_t N>
NelderMeadResult<N> nelder_mead(const std::function<double(const std::array<double, N>&)>& objective,
                                const std::array<double, N>& x0, const Box<N>& box,
                                const NelderMeadOptions& options) {
  auto result = nelder_mead_run(objective, x0, box, options, options.max_iters);
  // A collapsed simplex can stall away from a minimum; rebuild it around the
  // incumbent until a restart no longer improves the objective.
  for (std::size_t r = 0; r < options.max_restarts && result.converged; ++r) {
    if (result.iterations >= options.max_iters) break;
    auto next = nelder_mead_run(objective, result.x, box, options, options.max_iters - result.iterations);
    const double gain = result.f - next.f;
    next.iterations += result.iterations;
    next.evaluations += result.evaluations;
    const bool improved = gain > options.f_tol;
    if (next.f <= result.f) result = next;
    else {
      result.iterations = next.iterations;
      result.evaluations = next.evaluations;
      result.converged = next.converged;
    }
    if (!improved) break;
  }
  return result;
}

template std::vector<std::array<double, 2>> latin_hypercube<2>(std::size_t, const Box<2>&,
                                                               std::uint64_t);
template std::vector<Vec8> latin_hypercube<kNumEffectiveParams>(std::size_t, const Box8&,
                                                                std::uint64_t);
template NelderMeadResult<2> nelder_mead<2>(const std::function<double(const std::array<double, 2>&)>&,
                                            const std::array<double, 2>&, const Box<2>&,
                                            const NelderMeadOptions&);
template NelderMeadResult<kNumEffectiveParams> nelder_mead<kNumEffectiveParams>(
    const std::function<double(const Vec8&)>&, const Vec8&, const Box8&, const NelderMeadOptions&);

EstimationResult multistart_minimize(const std::function<double(const Vec8&)>& objective,
                                     const Box8& box, std::size_t m, std::uint64_t seed,
                                     const EstimationOptions& options) {
  if (m == 0) throw DomainError("multi-start needs m >= 1");
  const auto starts = latin_hypercube(m, box, seed);
  EstimationResult result;
  result.m = m;
  result.starts.resize(m);
  parallel_for(m, options.jobs, [&](std::size_t j) {
    const auto nm = nelder_mead<kNumEffectiveParams>(objective, starts[j], box, options.nelder_mead);
    result.starts[j] = StartOutcome{starts[j], nm.x, nm.f, nm.iterations, nm.converged, false};
  });
  classify_and_summarize(result, options.convergence_ratio, options.nelder_mead.f_tol);
  return result;
}

EstimationResult multistart_estimate(const Dataset& data, const ParamBox& box, std::size_t m,
                                     std::uint64_t seed, const EstimationOptions& options) {
  validate(data);
  const auto objective = [&](const Vec8& x) {
    return loss(EffectiveParams::unchecked(x), data, options.loss).value;
  };
  return multistart_minimize(objective, box, m, seed, options);
}

void classify_and_summarize(EstimationResult& result, double ratio, double f_tol) {
  result.m = result.starts.size();
  result.m_prime = 0;
  result.relative_sd.reset();
  if (result.starts.empty()) return;
  std::size_t best = 0;
  for (std::size_t j = 1; j < result.starts.size(); ++j) {
    if (result.starts[j].loss < result.starts[best].loss) best = j;
  }
  result.theta_best = result.starts[best].theta;
  result.loss_best = result.starts[best].loss;

  std::vector<Vec8> accepted;
  for (auto& s : result.starts) {
    if (result.loss_best == 0.0) {
      s.converged = s.loss <= f_tol;
    } else {
      s.converged = std::abs(s.loss - result.loss_best) / std::abs(result.loss_best) <= ratio;
    }
    if (s.converged) accepted.push_back(s.theta);
  }
  result.m_prime = accepted.size();
  result.relative_sd = relative_sd(accepted);
}

std::optional<Vec8> relative_sd(const std::vector<Vec8>& estimates) {
  if (estimates.size() < 2) return std::nullopt;
  const double count = static_cast<double>(estimates.size());
  Vec8 out{};
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    double mean = 0.0;
    for (const auto& e : estimates) mean += e[i];
    mean /= count;
    double ss = 0.0;
    for (const auto& e : estimates) ss += (e[i] - mean) * (e[i] - mean);
    out[i] = std::sqrt(ss) / std::sqrt(count - 1.0) / mean;
  }
  return out;
}

double relative_error(const Vec8& theta_hat, const Vec8& theta_true) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    num += std::abs(theta_true[i] - theta_hat[i]);
    den += std::abs(theta_true[i]);
  }
  if (!(den > 0.0)) throw DomainError("relative error needs a nonzero reference");
  return num / den * 100.0;
}

ReportRow summarize(const EstimationResult& result, const std::optional<Vec8>& theta_true,
                    std::string label) {
  ReportRow row;
  row.label = std::move(label);
  row.estimate = result.theta_best;
  row.relative_sd = result.m_prime > 0 ? result.relative_sd : std::nullopt;
  if (theta_true) row.relative_error = relative_error(result.theta_best, *theta_true);
  row.m = result.m;
  row.m_prime = result.m_prime;
  row.loss_best = result.loss_best;
  return row;
}

std::string report_csv_header() {
  std::ostringstream out;
  out << "label,m,m_prime,loss_best";
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) out << ',' << EffectiveParams::name(i);
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) out << ",rsd_" << EffectiveParams::name(i);
  out << ",relative_error\n";
  return out.str();
}

std::string report_csv_row(const ReportRow& row) {
  std::ostringstream out;
  out << row.label << ',' << row.m << ',' << row.m_prime << ',' << format_double(row.loss_best);
  for (double v : row.estimate) out << ',' << format_double(v);
  for (std::size_t i = 0; i < kNumEffectiveParams; ++i) {
    out << ',' << (row.relative_sd ? format_double((*row.relative_sd)[i]) : "NA");
  }
  out << ',' << (row.relative_error ? format_double(*row.relative_error) : "NA") << '\n';
  return out.str();
}

}  // namespace glyco
