// File formats: trajectory CSV + JSON sidecar, ODE solution CSV, and the
// shortest round-trip number formatting shared by every writer.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "glyco/network.hpp"
#include "glyco/reduced.hpp"
#include "glyco/ssa.hpp"

namespace glyco {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

/// Parses a double written by format_double (or any strtod-compatible text).
double parse_double(const std::string& text);

/// Header "t,A1,A2,A3,A4,E1,E1star,E1A1,E1starA1,E2,E2A2", one row per record.
std::string trajectory_csv(const Trajectory& traj);

/// JSON sidecar: seed, n, kappa, horizon, jumps, reaction_counts, initial and final state.
std::string trajectory_sidecar_json(const Trajectory& traj, const RateTable& kappa,
                                    std::uint64_t replicate);

/// Reads the CSV written by trajectory_csv back into times and states.
struct TrajectoryTable {
  std::vector<double> times;
  std::vector<State> states;
};
TrajectoryTable parse_trajectory_csv(const std::string& text);

/// Header "t,Z_A1,Z_A2" on the given grid.
std::string ode_csv(const OdeSolution& sol, const std::vector<double>& grid);

struct OdeTable {
  std::vector<double> times;
  std::vector<std::array<double, 2>> values;
};
OdeTable parse_ode_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace glyco
