#include "adcons/scenario.hpp"

#include <set>

#include "adcons/errors.hpp"
#include "adcons/gain_io.hpp"

namespace adcons {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.contains(key)) throw ConfigError(where + ": unknown key \"" + key + "\"");
  }
}

double number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw ConfigError(std::string("\"") + key + "\" must be a number");
  return obj.at(key).get<double>();
}

std::size_t index_value(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw ConfigError(std::string(what) + " must be a nonnegative integer");
  }
  return j.get<std::size_t>();
}

struct ParsedModel {
  std::string name;
  LinearModel linear;
  std::optional<NonlinearModel> nonlinear;
};

ParsedModel parse_model(const json& spec) {
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (auto nl = named_nonlinear_model(name)) return {name, nl->linear, std::move(nl)};
    if (auto lin = named_linear_model(name)) return {name, *lin, std::nullopt};
    throw ConfigError("unknown benchmark model \"" + name + "\"");
  }
  if (!spec.is_object()) throw ConfigError("\"model\" must be a name or an object");
  reject_unknown(spec, {"A", "B", "D1", "gamma", "f"}, "model");
  if (!spec.contains("A") || !spec.contains("B")) throw ConfigError("model: \"A\" and \"B\" are required");
  Matrix a = matrix_from_json(spec.at("A"), "model.A");
  Matrix b = matrix_from_json(spec.at("B"), "model.B");
  if (a.rows() != a.cols() || b.rows() != a.rows()) {
    throw ConfigError("model: A must be n x n and B n x p");
  }
  LinearModel linear(std::move(a), std::move(b));
  if (!spec.contains("D1") && !spec.contains("f") && !spec.contains("gamma")) {
    return {"inline", linear, std::nullopt};
  }
  if (!spec.contains("D1") || !spec.contains("f") || !spec.contains("gamma")) {
    throw ConfigError("model: a nonlinear model needs \"D1\", \"f\" and \"gamma\"");
  }
  Matrix d1 = matrix_from_json(spec.at("D1"), "model.D1");
  const json& f = spec.at("f");
  if (!f.is_object() || !f.contains("kind") || !f.contains("M")) {
    throw ConfigError("model.f: expected {\"kind\": \"sin\" | \"linear\", \"M\": [[...]]}");
  }
  reject_unknown(f, {"kind", "M"}, "model.f");
  Matrix m = matrix_from_json(f.at("M"), "model.f.M");
  if (m.cols() != linear.n() || m.rows() != d1.cols() || d1.rows() != linear.n()) {
    throw ConfigError("model: D1 must be n x m and f.M m x n");
  }
  const std::string kind = f.at("kind").get<std::string>();
  Nonlinearity fn;
  if (kind == "sin") {
    fn = sine_nonlinearity(std::move(m));
  } else if (kind == "linear") {
    fn = linear_nonlinearity(std::move(m));
  } else {
    throw ConfigError("model.f.kind must be \"sin\" or \"linear\"");
  }
  const double gamma = number(spec, "gamma", 0.0);
  if (!(gamma > 0.0)) throw ConfigError("model.gamma must be positive");
  NonlinearModel nl(linear, std::move(d1), std::move(fn), gamma);
  return {"inline", linear, std::move(nl)};
}

}  // namespace

std::pair<Topology, std::string> parse_topology(const json& spec) {
  try {
    if (spec.is_string()) {
      if (spec.get<std::string>() == "benchmark") return {benchmark_topology(), "benchmark"};
      throw ConfigError("unknown topology \"" + spec.get<std::string>() + "\"");
    }
    if (!spec.is_object()) throw ConfigError("\"topology\" must be a name or an object");
    reject_unknown(spec, {"family", "n", "edges"}, "topology");
    if (!spec.contains("n")) throw ConfigError("topology: \"n\" is required");
    const std::size_t n = index_value(spec.at("n"), "topology.n");
    if (n == 0) throw ConfigError("topology.n must be positive");
    if (spec.contains("family")) {
      if (spec.contains("edges")) throw ConfigError("topology: give either \"family\" or \"edges\"");
      const std::string family = spec.at("family").get<std::string>();
      const std::string name = family + " " + std::to_string(n);
      if (family == "ring") return {ring_topology(n), name};
      if (family == "complete") return {complete_topology(n), name};
      if (family == "path") return {path_topology(n), name};
      if (family == "star") return {star_topology(n), name};
      throw ConfigError("topology.family must be ring, complete, path or star");
    }
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    if (spec.contains("edges")) {
      if (!spec.at("edges").is_array()) throw ConfigError("topology.edges must be an array");
      for (const json& e : spec.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw ConfigError("topology.edges entries must be [i, j]");
        edges.emplace_back(index_value(e[0], "edge index"), index_value(e[1], "edge index"));
      }
    }
    return {Topology(n, edges), "custom " + std::to_string(n)};
  } catch (const TopologyError& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
}

namespace {

Variant parse_variant(const std::string& name) {
  if (name == "static") return Variant::Static;
  if (name == "adaptive") return Variant::Adaptive;
  if (name == "adaptive-nonlinear") return Variant::AdaptiveNonlinear;
  if (name == "leader") return Variant::Leader;
  throw ConfigError("protocol.variant must be static, adaptive, adaptive-nonlinear or leader");
}

}  // namespace

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Static: return "static";
    case Variant::Adaptive: return "adaptive";
    case Variant::AdaptiveNonlinear: return "adaptive-nonlinear";
    case Variant::Leader: return "leader";
  }
  return "unknown";
}

std::optional<NonlinearModel> named_nonlinear_model(const std::string& name) {
  if (name == "manipulator") return manipulator_model();
  return std::nullopt;
}

std::optional<LinearModel> named_linear_model(const std::string& name) {
  if (name == "double_integrator") {
    Matrix a(2, 2);
    a << 0.0, 1.0, 0.0, 0.0;
    Matrix b(2, 1);
    b << 0.0, 1.0;
    return LinearModel(std::move(a), std::move(b));
  }
  return std::nullopt;
}

Scenario parse_scenario(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("scenario must be a JSON object");
  reject_unknown(doc, {"name", "model", "topology", "protocol", "sim", "gains", "output", "svg"},
                 "scenario");
  if (!doc.contains("model")) throw ConfigError("scenario: \"model\" is required");
  if (!doc.contains("topology")) throw ConfigError("scenario: \"topology\" is required");

  ParsedModel model = parse_model(doc.at("model"));
  auto [topology, topology_name] = parse_topology(doc.at("topology"));

  Scenario sc{
      .model_name = model.name,
      .linear = model.linear,
      .nonlinear = std::move(model.nonlinear),
      .topology = std::move(topology),
      .topology_name = std::move(topology_name),
  };
  const Eigen::Index n = sc.linear.n();
  const auto agents = sc.topology.n_agents();

  const json proto = doc.value("protocol", json::object());
  if (!proto.is_object()) throw ConfigError("\"protocol\" must be an object");
  reject_unknown(proto, {"variant", "kappa", "c", "pins", "kappa_leader", "leader_state"}, "protocol");
  sc.variant = proto.contains("variant")
                   ? parse_variant(proto.at("variant").get<std::string>())
                   : (sc.nonlinear ? Variant::AdaptiveNonlinear : Variant::Adaptive);
  sc.kappa = number(proto, "kappa", 1.0);
  if (!(sc.kappa > 0.0)) throw ConfigError("protocol.kappa must be positive");
  if (proto.contains("c")) {
    sc.static_c = number(proto, "c", 0.0);
    if (!(*sc.static_c >= 0.0)) throw ConfigError("protocol.c must be nonnegative");
  }
  sc.kappa_leader = number(proto, "kappa_leader", 1.0);
  if (!(sc.kappa_leader > 0.0)) throw ConfigError("protocol.kappa_leader must be positive");
  if (proto.contains("pins")) {
    if (!proto.at("pins").is_array()) throw ConfigError("protocol.pins must be an array");
    for (const json& p : proto.at("pins")) {
      Pin pin;
      if (p.is_object()) {
        reject_unknown(p, {"agent", "d"}, "protocol.pins");
        if (!p.contains("agent")) throw ConfigError("protocol.pins: \"agent\" is required");
        pin.agent = index_value(p.at("agent"), "pin agent");
        pin.d = number(p, "d", 1.0);
      } else {
        pin.agent = index_value(p, "pin agent");
      }
      if (pin.agent >= agents) throw ConfigError("protocol.pins: agent index out of range");
      if (!(pin.d >= 0.0)) throw ConfigError("protocol.pins: d must be nonnegative");
      sc.pins.push_back(pin);
    }
  }
  if (proto.contains("leader_state")) {
    sc.leader_state = vector_from_json(proto.at("leader_state"), "protocol.leader_state");
    if (sc.leader_state->size() != n) throw ConfigError("protocol.leader_state must have n entries");
  }

  switch (sc.variant) {
    case Variant::Static:
    case Variant::Adaptive:
      if (sc.nonlinear) {
        throw ConfigError(std::string("variant \"") + variant_name(sc.variant) +
                          "\" needs a linear model; use \"adaptive-nonlinear\"");
      }
      break;
    case Variant::AdaptiveNonlinear:
      if (!sc.nonlinear) throw ConfigError("variant \"adaptive-nonlinear\" needs a nonlinear model");
      break;
    case Variant::Leader: {
      bool any = false;
      for (const Pin& p : sc.pins) any = any || p.d > 0.0;
      if (!any) {
        throw ConfigError(
            "variant \"leader\" needs a non-empty pin set with some d_i > 0 (at least one "
            "follower must have access to the leader's state)");
      }
      break;
    }
  }

  const json sim = doc.value("sim", json::object());
  if (!sim.is_object()) throw ConfigError("\"sim\" must be an object");
  reject_unknown(sim,
                 {"dt", "t_final", "seed", "init_state_scale", "init_coupling_low",
                  "init_coupling_high", "record_stride", "threshold"},
                 "sim");
  sc.sim.dt = number(sim, "dt", sc.sim.dt);
  sc.sim.t_final = number(sim, "t_final", sc.sim.t_final);
  if (sim.contains("seed")) sc.sim.seed = index_value(sim.at("seed"), "sim.seed");
  sc.sim.init_state_scale = number(sim, "init_state_scale", sc.sim.init_state_scale);
  sc.sim.init_coupling_low = number(sim, "init_coupling_low", sc.sim.init_coupling_low);
  sc.sim.init_coupling_high = number(sim, "init_coupling_high", sc.sim.init_coupling_high);
  if (sim.contains("record_stride")) {
    sc.sim.record_stride = static_cast<int>(index_value(sim.at("record_stride"), "sim.record_stride"));
  }
  sc.sim.kappa = sc.kappa;
  sc.threshold = number(sim, "threshold", sc.threshold);
  if (!(sc.threshold > 0.0)) throw ConfigError("sim.threshold must be positive");
  sc.sim.validate();

  if (doc.contains("gains")) {
    std::filesystem::path g = doc.at("gains").get<std::string>();
    sc.gains_path = g.is_relative() ? base_dir / g : g;
  }
  if (doc.contains("output")) {
    std::filesystem::path o = doc.at("output").get<std::string>();
    sc.output_dir = o.is_relative() ? base_dir / o : o;
  }
  if (doc.contains("svg")) {
    if (!doc.at("svg").is_boolean()) throw ConfigError("\"svg\" must be true or false");
    sc.svg = doc.at("svg").get<bool>();
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  const json doc = read_json(path);
  try {
    return parse_scenario(doc, path.parent_path());
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json builtin_scenario(const std::string& name) {
  if (name == "manipulator") {
    return {
        {"name", "manipulator"},
        {"model", "manipulator"},
        {"topology", "benchmark"},
        {"protocol", {{"variant", "adaptive-nonlinear"}, {"kappa", 1.0}}},
        {"sim",
         {{"dt", 1e-3},
          {"t_final", 20.0},
          {"seed", 1},
          {"init_coupling_low", 0.0},
          {"init_coupling_high", 1.0},
          {"record_stride", 10},
          {"threshold", 1e-3}}},
        {"output", "out/manipulator"},
    };
  }
  if (name == "leader") {
    return {
        {"name", "leader"},
        {"model", "double_integrator"},
        {"topology", {{"family", "path"}, {"n", 5}}},
        {"protocol",
         {{"variant", "leader"},
          {"pins", json::array({{{"agent", 0}, {"d", 1.0}}})},
          {"kappa", 100.0},
          {"kappa_leader", 100.0}}},
        {"sim", {{"dt", 1e-3}, {"t_final", 30.0}, {"seed", 1}, {"record_stride", 10}, {"threshold", 1e-3}}},
        {"output", "out/leader"},
    };
  }
  throw ConfigError("unknown built-in scenario \"" + name + "\" (manipulator, leader)");
}

}  // namespace adcons
