#include "adcons/csv.hpp"

#include <cstdio>
#include <fstream>

#include "adcons/errors.hpp"

namespace adcons {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_states_csv(std::ostream& out, const Trajectory& traj) {
  const Eigen::Index n = traj.state_dim;
  out << "time";
  for (std::size_t i = 0; i < traj.n_agents; ++i) {
    for (Eigen::Index k = 0; k < n; ++k) out << ",x" << i + 1 << '_' << k + 1;
  }
  if (traj.has_leader) {
    for (Eigen::Index k = 0; k < n; ++k) out << ",x0_" << k + 1;
  }
  out << '\n';
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out << format_number(traj.times[s]);
    const Matrix& x = traj.states[s];
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_number(x(i, k));
    }
    if (traj.has_leader) {
      for (Eigen::Index k = 0; k < n; ++k) out << ',' << format_number(traj.leader_states[s](k));
    }
    out << '\n';
  }
}

void write_weights_csv(std::ostream& out, const Trajectory& traj) {
  out << "time";
  const bool edges = !traj.couplings.empty();
  if (edges) {
    for (const Edge& e : traj.edges) out << ",c_" << e.i + 1 << '_' << e.j + 1;
  }
  if (traj.has_leader) {
    for (std::size_t i = 0; i < traj.n_agents; ++i) out << ",c0_" << i + 1;
  }
  out << '\n';
  for (std::size_t s = 0; s < traj.size(); ++s) {
    out << format_number(traj.times[s]);
    if (edges) {
      for (Eigen::Index k = 0; k < traj.couplings[s].size(); ++k) {
        out << ',' << format_number(traj.couplings[s](k));
      }
    }
    if (traj.has_leader) {
      for (Eigen::Index k = 0; k < traj.leader_couplings[s].size(); ++k) {
        out << ',' << format_number(traj.leader_couplings[s](k));
      }
    }
    out << '\n';
  }
}

namespace {

template <class Writer>
void write_file(const std::filesystem::path& path, const Trajectory& traj, Writer writer) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  writer(out, traj);
}

}  // namespace

void write_states_csv(const std::filesystem::path& path, const Trajectory& traj) {
  write_file(path, traj, [](std::ostream& o, const Trajectory& t) { write_states_csv(o, t); });
}

void write_weights_csv(const std::filesystem::path& path, const Trajectory& traj) {
  write_file(path, traj, [](std::ostream& o, const Trajectory& t) { write_weights_csv(o, t); });
}

}  // namespace adcons
