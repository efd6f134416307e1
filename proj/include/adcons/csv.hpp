#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "adcons/sim.hpp"

namespace adcons {

/// 17 significant digits: round-trips every double exactly.
std::string format_number(double v);

/// time, x{agent}_{coord} (agent-major, 1-based), then x0_{coord} for the
/// leader when present.
void write_states_csv(std::ostream& out, const Trajectory& traj);

/// time, c_{i}_{j} per edge in lexicographic order (1-based), then c0_{i}
/// per follower for leader runs.
void write_weights_csv(std::ostream& out, const Trajectory& traj);

void write_states_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_weights_csv(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace adcons
