#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "adcons/dynamics.hpp"
#include "adcons/graph.hpp"
#include "adcons/sim.hpp"

namespace adcons {

enum class Variant { Static, Adaptive, AdaptiveNonlinear, Leader };

const char* variant_name(Variant v);

struct Pin {
  std::size_t agent = 0;
  double d = 1.0;
};

/// A fully parsed and validated scenario document.
struct Scenario {
  std::string model_name;  // benchmark name or "inline"
  LinearModel linear;
  std::optional<NonlinearModel> nonlinear;
  Topology topology;
  std::string topology_name;
  Variant variant = Variant::Adaptive;

  double kappa = 1.0;
  std::optional<double> static_c;
  std::vector<Pin> pins;
  double kappa_leader = 1.0;
  std::optional<Vector> leader_state;

  SimConfig sim;
  double threshold = 1e-3;
  std::optional<std::filesystem::path> gains_path;
  std::filesystem::path output_dir = "out";
  bool svg = false;
};

/// Parses a scenario document. Relative "gains" and "output" paths resolve
/// against `base_dir`. Throws ConfigError on unknown keys, missing
/// variant-specific fields, or inconsistent dimensions.
Scenario parse_scenario(const nlohmann::json& doc,
                        const std::filesystem::path& base_dir = std::filesystem::path());

Scenario load_scenario(const std::filesystem::path& path);

/// Topology spec alone: "benchmark", {"family": ring|complete|path|star, "n": N},
/// or {"n": N, "edges": [[i, j], ...]} with 0-based indices. Returns the
/// topology and a display name.
std::pair<Topology, std::string> parse_topology(const nlohmann::json& spec);

/// Built-in scenario documents: "manipulator" (the eight-agent benchmark) and
/// "leader" (double integrators on a 5-path, follower 1 pinned).
nlohmann::json builtin_scenario(const std::string& name);

/// Benchmark models addressable by name: "manipulator", "double_integrator".
std::optional<NonlinearModel> named_nonlinear_model(const std::string& name);
std::optional<LinearModel> named_linear_model(const std::string& name);

}  // namespace adcons
