#include "glyco/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace glyco {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text, std::size_t columns,
                                                const std::string& header) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::runtime_error("unexpected CSV header, want: " + header);
  }
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != columns) throw std::runtime_error("CSV row has wrong column count");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string trajectory_header() {
  std::string h = "t";
  for (std::size_t s = 0; s < kNumSpecies; ++s) {
    h += ',';
    h += species_name(static_cast<Species>(s));
  }
  return h;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("not a number: '" + text + "'");
  }
  return v;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = trajectory_header() + '\n';
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    out += format_double(traj.times[j]);
    for (auto c : traj.states[j]) {
      out += ',';
      out += std::to_string(c);
    }
    out += '\n';
  }
  return out;
}

std::string trajectory_sidecar_json(const Trajectory& traj, const RateTable& kappa,
                                    std::uint64_t replicate) {
  nlohmann::ordered_json j;
  j["replicate"] = replicate;
  j["seed"] = traj.seed;
  j["n"] = traj.n;
  j["horizon"] = traj.horizon;
  j["jumps"] = traj.jumps;
  nlohmann::ordered_json k;
  for (std::size_t r = 0; r < kNumRates; ++r) k[std::string(rate_name(static_cast<Rate>(r)))] = kappa[r];
  j["kappa"] = k;
  nlohmann::ordered_json counts;
  for (std::size_t r = 0; r < kNumReactions; ++r) {
    counts[std::string(reaction_name(static_cast<Reaction>(r)))] = traj.reaction_counts[r];
  }
  j["reaction_counts"] = counts;
  auto state_json = [](const State& x) {
    nlohmann::ordered_json s;
    for (std::size_t i = 0; i < kNumSpecies; ++i) s[std::string(species_name(static_cast<Species>(i)))] = x[i];
    return s;
  };
  j["initial"] = state_json(traj.initial);
  j["final"] = state_json(traj.final_state);
  j["records"] = traj.times.size();
  return j.dump(2) + '\n';
}

TrajectoryTable parse_trajectory_csv(const std::string& text) {
  TrajectoryTable table;
  for (const auto& row : parse_csv(text, kNumSpecies + 1, trajectory_header())) {
    table.times.push_back(parse_double(row[0]));
    State x{};
    for (std::size_t i = 0; i < kNumSpecies; ++i) x[i] = std::stoll(row[i + 1]);
    table.states.push_back(x);
  }
  return table;
}

std::string ode_csv(const OdeSolution& sol, const std::vector<double>& grid) {
  std::string out = "t,Z_A1,Z_A2\n";
  OdeSolution::Cursor cursor(sol);
  for (double t : grid) {
    const auto z = cursor(t);
    out += format_double(t) + ',' + format_double(z[0]) + ',' + format_double(z[1]) + '\n';
  }
  return out;
}

OdeTable parse_ode_csv(const std::string& text) {
  OdeTable table;
  for (const auto& row : parse_csv(text, 3, "t,Z_A1,Z_A2")) {
    table.times.push_back(parse_double(row[0]));
    table.values.push_back({parse_double(row[1]), parse_double(row[2])});
  }
  return table;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace glyco
